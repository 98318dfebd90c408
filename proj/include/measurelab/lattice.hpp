#pragma once

// Periodic lattice discretization of R^d, real fields on it, and exact
// Fourier-multiplier / envelope operators.
//
// Conventions (fixed for bit-reproducible output):
//   sites per axis    x_j = (j - N/2) a,   j = 0..N-1,   a = L/N
//   momenta per axis  p_n = (2 pi / L) nu(n),  nu(n) = n (n < N/2), n - N otherwise
//   forward           phi^(p) = a^d  sum_x phi(x) e^{-i p.x}
//   inverse           phi(x)  = L^-d sum_p phi^(p) e^{+i p.x}
// Arrays are row-major with the last axis fastest.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mlab {

class LatticeSpec {
 public:
  static constexpr int kMaxDim = 3;

  /// Validates d in {1,2,3}, N even and >= 4, L > 0.
  LatticeSpec(int dim, int sites_per_axis, double length);

  int dim() const { return dim_; }
  int sites_per_axis() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_volume() const;  // a^d
  double box_volume() const;   // L^d
  std::size_t site_count() const { return site_count_; }

  /// Centered coordinate of axis index j.
  double coordinate(int j) const { return (j - n_ / 2) * spacing(); }
  /// Signed integer frequency nu(n).
  int frequency(int n) const { return n < n_ / 2 ? n : n - n_; }
  double momentum_1d(int n) const;

  /// Momentum vector for a multi-index; throws INDEX_OUT_OF_RANGE.
  std::vector<double> momentum(std::span<const int> index) const;

  std::array<int, kMaxDim> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const int> index) const;

  /// |x|^2 and |p|^2 at a flat index.
  double position_sq(std::size_t flat) const;
  double momentum_sq(std::size_t flat) const;

  /// Flat index of the mode -n.
  std::size_t conjugate_index(std::size_t flat) const;

  /// Whole-lattice tables of the three per-index quantities above, in flat order.
  std::vector<double> position_sq_table() const;
  std::vector<double> momentum_sq_table() const;
  std::vector<std::size_t> conjugate_table() const;
  /// Flat index of the site x = 0.
  std::size_t origin_index() const;

  bool operator==(const LatticeSpec& other) const = default;

 private:
  int dim_;
  int n_;
  double length_;
  std::size_t site_count_;
};

/// Same as constructing a LatticeSpec; named after the operation it performs.
LatticeSpec make_lattice(int dim, int sites_per_axis, double length);

/// A real field sample on the lattice. Values are finite and there are N^d of them.
class Field {
 public:
  explicit Field(const LatticeSpec& spec);  // zero field
  Field(const LatticeSpec& spec, std::vector<double> values);

  static Field constant(const LatticeSpec& spec, double value);

  const LatticeSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  LatticeSpec spec_;
  std::vector<double> values_;
};

/// Test functions f in S(R^d) are represented by their lattice samples.
using TestFunction = Field;

/// Fourier coefficients on the momentum lattice, same flat layout as Field.
struct Spectrum {
  LatticeSpec spec;
  std::vector<std::complex<double>> coeffs;
};

/// Symbol sigma(p) = (m^2 + |p|^2)^s of the operator (m^2 - Delta)^s.
class Multiplier {
 public:
  static Multiplier fractional_resolvent(double mass, double exponent);

  double mass() const { return mass_; }
  double exponent() const { return exponent_; }
  double symbol(double p_sq) const;

 private:
  Multiplier(double mass, double exponent) : mass_(mass), exponent_(exponent) {}
  double mass_;
  double exponent_;
};

Spectrum dft_forward(const Field& field);
/// Real part of the inverse transform. Exact for Hermitian-symmetric input.
Field dft_inverse(const Spectrum& spectrum);

Field apply_multiplier(const Field& field, const Multiplier& mult);
/// Pointwise phi(x) (1 + |x|^2)^-alpha.
Field apply_envelope(const Field& field, double alpha);
/// a^d sum_x phi(x)^2.
double l2_norm_sq(const Field& field);

}  // namespace mlab
