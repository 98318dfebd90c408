#include "measurelab/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <numbers>
#include <string>

#include "measurelab/error.hpp"

namespace mlab {

namespace {

// Calls f(flat, idx) for every multi-index in flat order.
template <class F>
void walk(const LatticeSpec& spec, F&& f) {
  std::array<int, LatticeSpec::kMaxDim> idx{};
  const int d = spec.dim();
  const int n = spec.sites_per_axis();
  for (std::size_t flat = 0; flat < spec.site_count(); ++flat) {
    f(flat, idx);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
}

// Per-axis table -> whole-lattice sum table.
std::vector<double> radial_table(const LatticeSpec& spec, const std::vector<double>& axis) {
  std::vector<double> out(spec.site_count());
  walk(spec, [&](std::size_t flat, const auto& idx) {
    double s = 0.0;
    for (int i = 0; i < spec.dim(); ++i) s += axis[idx[i]];
    out[flat] = s;
  });
  return out;
}

// Plans are created once per shape. FFTW planning is not thread-safe; execution
// of an existing plan on new arrays is.
fftw_plan cached_plan(const LatticeSpec& spec, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(spec.dim(), spec.sites_per_axis(), sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  int dims[LatticeSpec::kMaxDim];
  for (int i = 0; i < spec.dim(); ++i) dims[i] = spec.sites_per_axis();
  auto* scratch = fftw_alloc_complex(spec.site_count());
  fftw_plan plan = fftw_plan_dft(spec.dim(), dims, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  plans.emplace(key, plan);
  return plan;
}

void fft_in_place(const LatticeSpec& spec, std::vector<std::complex<double>>& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(spec, sign), buf, buf);
}

// Multiplies entry k by scale * (-1)^{n_1 + ... + n_d}: the phase e^{i pi nu}
// from centering x_j = (j - N/2) a.
void apply_centering(const LatticeSpec& spec, std::vector<std::complex<double>>& data, double scale) {
  walk(spec, [&](std::size_t flat, const auto& idx) {
    int s = 0;
    for (int i = 0; i < spec.dim(); ++i) s += idx[i];
    data[flat] *= (s & 1) ? -scale : scale;
  });
}

}  // namespace

LatticeSpec::LatticeSpec(int dim, int sites_per_axis, double length)
    : dim_(dim), n_(sites_per_axis), length_(length), site_count_(1) {
  if (dim < 1 || dim > kMaxDim) throw Error(Errc::BadDimension, "d = " + std::to_string(dim));
  if (sites_per_axis < 4 || sites_per_axis % 2 != 0)
    throw Error(Errc::OddN, "N must be even and >= 4, got " + std::to_string(sites_per_axis));
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(Errc::NonpositiveLength, "L = " + std::to_string(length));
  for (int i = 0; i < dim; ++i) site_count_ *= static_cast<std::size_t>(sites_per_axis);
}

LatticeSpec make_lattice(int dim, int sites_per_axis, double length) {
  return LatticeSpec(dim, sites_per_axis, length);
}

double LatticeSpec::cell_volume() const { return std::pow(spacing(), dim_); }
double LatticeSpec::box_volume() const { return std::pow(length_, dim_); }

double LatticeSpec::momentum_1d(int n) const { return 2.0 * std::numbers::pi / length_ * frequency(n); }

std::vector<double> LatticeSpec::momentum(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dim_) throw Error(Errc::SizeMismatch, "index rank != d");
  std::vector<double> p(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= n_) throw Error(Errc::IndexOutOfRange, "n = " + std::to_string(index[i]));
    p[i] = momentum_1d(index[i]);
  }
  return p;
}

std::array<int, LatticeSpec::kMaxDim> LatticeSpec::unflatten(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int i = dim_ - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t LatticeSpec::flatten(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int i = 0; i < dim_; ++i) flat = flat * n_ + static_cast<std::size_t>(index[i]);
  return flat;
}

double LatticeSpec::position_sq(std::size_t flat) const {
  const auto idx = unflatten(flat);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double x = coordinate(idx[i]);
    s += x * x;
  }
  return s;
}

double LatticeSpec::momentum_sq(std::size_t flat) const {
  const auto idx = unflatten(flat);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double p = momentum_1d(idx[i]);
    s += p * p;
  }
  return s;
}

std::size_t LatticeSpec::conjugate_index(std::size_t flat) const {
  auto idx = unflatten(flat);
  for (int i = 0; i < dim_; ++i) idx[i] = (n_ - idx[i]) % n_;
  return flatten(std::span<const int>(idx.data(), dim_));
}

std::vector<double> LatticeSpec::position_sq_table() const {
  std::vector<double> axis(n_);
  for (int j = 0; j < n_; ++j) axis[j] = coordinate(j) * coordinate(j);
  return radial_table(*this, axis);
}

std::vector<double> LatticeSpec::momentum_sq_table() const {
  std::vector<double> axis(n_);
  for (int j = 0; j < n_; ++j) axis[j] = momentum_1d(j) * momentum_1d(j);
  return radial_table(*this, axis);
}

std::vector<std::size_t> LatticeSpec::conjugate_table() const {
  std::vector<std::size_t> out(site_count_);
  walk(*this, [&](std::size_t flat, const auto& idx) {
    std::size_t c = 0;
    for (int i = 0; i < dim_; ++i) c = c * n_ + static_cast<std::size_t>((n_ - idx[i]) % n_);
    out[flat] = c;
  });
  return out;
}

std::size_t LatticeSpec::origin_index() const {
  std::array<int, kMaxDim> idx{};
  for (int i = 0; i < dim_; ++i) idx[i] = n_ / 2;
  return flatten(std::span<const int>(idx.data(), dim_));
}

Field::Field(const LatticeSpec& spec) : spec_(spec), values_(spec.site_count(), 0.0) {}

Field::Field(const LatticeSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.site_count())
    throw Error(Errc::SizeMismatch, "field has " + std::to_string(values_.size()) + " values, lattice has " +
                                        std::to_string(spec_.site_count()) + " sites");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(Errc::NonfiniteValue, "field value is not finite");
}

Field Field::constant(const LatticeSpec& spec, double value) {
  return Field(spec, std::vector<double>(spec.site_count(), value));
}

Multiplier Multiplier::fractional_resolvent(double mass, double exponent) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(Errc::NonpositiveMass, "m = " + std::to_string(mass));
  if (!std::isfinite(exponent)) throw Error(Errc::NonfiniteValue, "exponent is not finite");
  return Multiplier(mass, exponent);
}

double Multiplier::symbol(double p_sq) const { return std::pow(mass_ * mass_ + p_sq, exponent_); }

Spectrum dft_forward(const Field& field) {
  const auto& spec = field.spec();
  std::vector<std::complex<double>> data(field.values().begin(), field.values().end());
  fft_in_place(spec, data, FFTW_FORWARD);
  apply_centering(spec, data, spec.cell_volume());
  return {spec, std::move(data)};
}

Field dft_inverse(const Spectrum& spectrum) {
  const auto& spec = spectrum.spec;
  if (spectrum.coeffs.size() != spec.site_count()) throw Error(Errc::SizeMismatch, "spectrum size != N^d");
  std::vector<std::complex<double>> data(spectrum.coeffs);
  apply_centering(spec, data, 1.0);
  fft_in_place(spec, data, FFTW_BACKWARD);
  const double inv_vol = 1.0 / spec.box_volume();
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * inv_vol;
  return Field(spec, std::move(out));
}

Field apply_multiplier(const Field& field, const Multiplier& mult) {
  auto spectrum = dft_forward(field);
  const auto& spec = field.spec();
  const auto p_sq = spec.momentum_sq_table();
  for (std::size_t k = 0; k < spectrum.coeffs.size(); ++k) spectrum.coeffs[k] *= mult.symbol(p_sq[k]);
  return dft_inverse(spectrum);
}

Field apply_envelope(const Field& field, double alpha) {
  Field out = field;
  const auto& spec = field.spec();
  const auto x_sq = spec.position_sq_table();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(1.0 + x_sq[i], -alpha);
  return out;
}

double l2_norm_sq(const Field& field) {
  double acc = 0.0;
  for (double v : field.values()) acc += v * v;
  return acc * field.spec().cell_volume();
}

}  // namespace mlab
