#pragma once

// Haar measure on the Bohr compactification, seen through its finite shadows
// R_gamma = Hom[G_gamma, T] ~ T^n. A point of R_gamma is a vector of angles,
// one per generator; cylindrical functions are trigonometric polynomials on it.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "measurelab/bohr_algebra.hpp"
#include "measurelab/gaussian_field.hpp"
#include "measurelab/rng.hpp"

namespace mlab {

using Complex = std::complex<double>;

/// p_gamma(xbar): the values xbar(k_i) = e^{i theta_i} on the generators.
struct TorusPoint {
  IndependentSet gamma;
  std::vector<double> angles;  // each in [0, 2 pi)
};

/// Independent uniform angles on [0, 2 pi).
TorusPoint haar_sample(const IndependentSet& gamma, const RngState& rng);

/// xbar(k) = e^{i m.theta} with m = decompose(k, gamma).
Complex evaluate_point(const TorusPoint& point, const FrequencyVector& k);

/// F(xbar) = sum_m c_m e^{i m.theta} over finitely many integer vectors m.
class CylFunction {
 public:
  explicit CylFunction(IndependentSet gamma) : gamma_(std::move(gamma)) {}
  CylFunction(IndependentSet gamma, std::map<IntVector, Complex> coeffs);

  static CylFunction constant(IndependentSet gamma, Complex c);
  static CylFunction character(IndependentSet gamma, IntVector m, Complex c = 1.0);

  const IndependentSet& gamma() const { return gamma_; }
  const std::map<IntVector, Complex>& coeffs() const { return coeffs_; }

  /// Adds c to the coefficient of m; zero coefficients are dropped.
  void add(const IntVector& m, Complex c);
  Complex coefficient(const IntVector& m) const;

  /// Evaluation on raw angles of the same torus.
  Complex at(std::span<const double> angles) const;

 private:
  IndependentSet gamma_;
  std::map<IntVector, Complex> coeffs_;
};

Complex evaluate(const CylFunction& f, const TorusPoint& point);

/// Haar integral of a trigonometric polynomial: the constant coefficient.
Complex integrate_exact(const CylFunction& f);

struct ComplexEstimate {
  Complex mean;
  /// sqrt(sum |F - mean|^2 / (M - 1)) / sqrt(M).
  double std_error = 0.0;
};

/// Mean of F over M Haar samples; throws BAD_REPLICAS for M < 100.
ComplexEstimate integrate_mc(const CylFunction& f, std::size_t replicas, const RngState& rng);

/// Monte-Carlo Gram matrix G_ab = E[ e^{i m_a.theta} conj(e^{i m_b.theta}) ].
std::vector<std::vector<ComplexEstimate>> character_gram(const IndependentSet& gamma,
                                                         std::span<const IntVector> characters,
                                                         std::size_t replicas, const RngState& rng);

/// Composition F o r where r: R_{gamma'} -> R_gamma is the restriction map
/// induced by the refinement matrix; the character m goes to M^T m.
CylFunction transport(const CylFunction& f, const IndependentSet& gamma_prime);

/// Image of a point of R_{gamma'} in R_gamma: theta_i = sum_j M_ij theta'_j mod 2 pi.
TorusPoint restrict_point(const TorusPoint& point, const IndependentSet& gamma);

struct PushforwardReport {
  Complex exact_direct;
  Complex exact_transported;
  ComplexEstimate mc_direct;
  ComplexEstimate mc_transported;  // sampled on gamma', mapped to gamma
  bool exact_agree;
  bool mc_agree;  // both MC estimates within 3 stderr of the exact value

  bool passed() const { return exact_agree && mc_agree; }
};

PushforwardReport pushforward_check(const IndependentSet& gamma, const IndependentSet& gamma_prime,
                                    const CylFunction& f, std::size_t replicas, const RngState& rng);

/// Finite union of disjoint half-open arcs [lo, hi) of the circle, in turns.
class ArcSet {
 public:
  /// Throws BAD_ARC unless 0 <= lo < hi <= 1 and arcs are pairwise disjoint.
  explicit ArcSet(std::vector<std::pair<mpq_class, mpq_class>> arcs);
  /// [0, r).
  static ArcSet prefix(const mpq_class& r);

  const std::vector<std::pair<mpq_class, mpq_class>>& arcs() const { return arcs_; }
  /// Haar measure r = total length in turns.
  const mpq_class& measure() const { return measure_; }
  bool contains(double angle) const;

 private:
  std::vector<std::pair<mpq_class, mpq_class>> arcs_;
  std::vector<std::pair<double, double>> bounds_;
  mpq_class measure_;
};

/// gamma_N = {s_1, ..., s_N} with s_i = center + radius 2^-i u_i over the basis
/// {"1", "u1", ..., "uN"}: an independent set inside the ball B(center, radius)
/// for any declared u_i in (0, 1), grown one point at a time.
IndependentSet independent_sequence(const mpq_class& center, const mpq_class& radius, std::size_t count);

struct ZnRow {
  std::size_t n;
  mpq_class exact;  // r^N
  double exact_value;
  double frequency;
  double sigma;  // sqrt(r^N (1 - r^N) / M)
  bool within;   // |frequency - exact| <= 3 sigma
};

/// mu_0(Z_N) = r^N against the Monte-Carlo frequency of {xbar(s_i) in U for
/// all i <= N}, for every N in sizes. Throws BAD_ARC unless 0 < r < 1.
std::vector<ZnRow> zn_probability(const ArcSet& arc, std::span<const std::size_t> sizes, std::size_t replicas,
                                  const RngState& rng);

/// psi = sum_k c_k F_k over finitely many distinct real frequencies.
class GlobalTrigPoly {
 public:
  explicit GlobalTrigPoly(BasisPtr basis) : basis_(std::move(basis)) {}

  const BasisPtr& basis() const { return basis_; }
  const std::map<FrequencyVector, Complex>& terms() const { return terms_; }

  void add(const FrequencyVector& k, Complex c);
  Complex coefficient(const FrequencyVector& k) const;
  bool is_constant() const;

  bool operator==(const GlobalTrigPoly& other) const { return terms_ == other.terms_; }

 private:
  BasisPtr basis_;
  std::map<FrequencyVector, Complex> terms_;
};

/// Haar integral: coefficient of F_0.
Complex integrate_exact(const GlobalTrigPoly& psi);

/// lambda^* psi: each c F_k becomes c F_{lambda k}. Throws ZERO_LAMBDA.
GlobalTrigPoly act_scale(const GlobalTrigPoly& psi, const mpq_class& lambda);

/// c_k == c_{lambda k} for every k in the support of psi or of its image.
bool is_invariant(const GlobalTrigPoly& psi, const mpq_class& lambda);

struct ErgodicityReport {
  std::size_t trials = 0;
  std::size_t invariant_nonconstant = 0;  // must be 0
  std::size_t constant_trials = 0;
  std::size_t constant_invariant = 0;  // must equal constant_trials
  std::size_t reflection_trials = 0;
  std::size_t reflection_invariant = 0;  // lambda = -1 exceptions, excluded

  bool passed() const {
    return trials > 0 && invariant_nonconstant == 0 && constant_invariant == constant_trials;
  }
};

/// Random nonconstant psi against random rational |lambda| not in {0, 1};
/// constants; and the lambda = -1 reflection exception psi = F_k + F_{-k}.
ErgodicityReport ergodicity_suite(std::size_t trials, const RngState& rng);

/// Random psi with terms over `basis` and the random lambda used by the suite.
GlobalTrigPoly random_trig_poly(const BasisPtr& basis, std::mt19937_64& engine, bool force_nonconstant);
mpq_class random_lambda(std::mt19937_64& engine);

}  // namespace mlab
