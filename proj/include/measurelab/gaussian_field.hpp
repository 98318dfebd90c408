#pragma once

// The canonical free-field Gaussian measure on the lattice: covariance
// (f,g)_m = 1/2 <f, (m^2 - Delta)^{-1/2} g>, i.e. spectral density
// sigma(p) = 1 / (2 sqrt(m^2 + |p|^2)).

#include <cstdint>
#include <vector>

#include "measurelab/kernels.hpp"
#include "measurelab/lattice.hpp"
#include "measurelab/rng.hpp"

namespace mlab {

class CovarianceParams {
 public:
  /// Throws NONPOSITIVE_MASS for m <= 0 (or non-finite m).
  explicit CovarianceParams(double mass);

  double mass() const { return mass_; }
  /// sigma(p) at |p|^2 = p_sq.
  double spectral_density(double p_sq) const;

 private:
  double mass_;
};

/// One draw: independent complex Gaussians on half of the modes, Hermitian
/// partner phi^(-p) = conj(phi^(p)), real Gaussians on self-conjugate modes,
/// scaled so that E[phi^(p) conj(phi^(p'))] = delta L^d sigma(p).
Field sample_field(const CovarianceParams& params, const LatticeSpec& spec, const RngState& rng);

/// sample_field with the per-lattice tables built once; draw(rng) returns the
/// same field as sample_field(params, spec, rng).
class FieldSampler {
 public:
  FieldSampler(const CovarianceParams& params, const LatticeSpec& spec);
  Field draw(const RngState& rng) const;

 private:
  LatticeSpec spec_;
  std::vector<double> amplitude_;  // sqrt(L^d sigma(p))
  std::vector<std::size_t> partner_;
};

/// C(x) = L^-d sum_p sigma(p) e^{ip.x} on every site.
Field lattice_kernel(const CovarianceParams& params, const LatticeSpec& spec);

/// C(0) = L^-d sum_p sigma(p) via the shell histogram; equals
/// lattice_kernel(...)[origin] up to rounding without an FFT.
double kernel_at_origin(const CovarianceParams& params, const LatticeSpec& spec);
double kernel_at_origin(const CovarianceParams& params, const LatticeSpec& spec,
                        const kernels::ShellHistogram& hist);

/// phi(f) = a^d sum_x f(x) phi(x).
double pair(const Field& field, const TestFunction& f);

/// (f,g)_m on the lattice: L^-d sum_p sigma(p) Re(f^(p) conj(g^(p))).
double covariance_exact(const TestFunction& f, const TestFunction& g, const CovarianceParams& params);

/// Squared Frobenius norm of (1+|x|^2)^-alpha (m^2-Delta)^-alpha on the lattice:
///   [N^-d sum_p (m^2+|p|^2)^{-2 alpha}] * [sum_x (1+|x|^2)^{-2 alpha}].
double hs_frobenius_sq(double alpha, const CovarianceParams& params, const LatticeSpec& spec);
double hs_frobenius_sq(double alpha, const CovarianceParams& params, const LatticeSpec& spec,
                       const kernels::ShellHistogram& hist);

/// Sample mean and its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of statistic(phi_r) over replicas r = 0..count-1,
/// each phi_r drawn from rng.replica(r). Replicas run in parallel; the merge is
/// in replica order.
template <class Statistic>
Estimate replica_estimate(const CovarianceParams& params, const LatticeSpec& spec, const RngState& rng,
                          std::size_t count, Statistic&& statistic);

Estimate mean_and_stderr(const std::vector<double>& samples);

}  // namespace mlab

namespace mlab {

template <class Statistic>
Estimate replica_estimate(const CovarianceParams& params, const LatticeSpec& spec, const RngState& rng,
                          std::size_t count, Statistic&& statistic) {
  const FieldSampler sampler(params, spec);
  auto values = kernels::parallel::map(count, [&](std::size_t r) {
    return static_cast<double>(statistic(sampler.draw(rng.replica(r))));
  });
  return mean_and_stderr(values);
}

}  // namespace mlab
