#include "measurelab/gaussian_field.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "measurelab/error.hpp"

namespace mlab {

namespace {

void check_histogram(const LatticeSpec& spec, const kernels::ShellHistogram& hist) {
  if (hist.dim() != spec.dim() || hist.sites_per_axis() != spec.sites_per_axis())
    throw Error(Errc::SizeMismatch, "shell histogram does not match lattice");
}

}  // namespace

CovarianceParams::CovarianceParams(double mass) : mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(Errc::NonpositiveMass, "m = " + std::to_string(mass));
}

double CovarianceParams::spectral_density(double p_sq) const { return 0.5 / std::sqrt(mass_ * mass_ + p_sq); }

FieldSampler::FieldSampler(const CovarianceParams& params, const LatticeSpec& spec)
    : spec_(spec), amplitude_(spec.momentum_sq_table()), partner_(spec.conjugate_table()) {
  const double volume = spec.box_volume();
  for (auto& v : amplitude_) v = std::sqrt(volume * params.spectral_density(v));
}

Field FieldSampler::draw(const RngState& rng) const {
  auto engine = rng.engine();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::complex<double>> modes(spec_.site_count());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const std::size_t partner = partner_[k];
    if (partner < k) continue;
    if (partner == k) {
      modes[k] = amplitude_[k] * gauss(engine);
    } else {
      const double re = gauss(engine);
      const double im = gauss(engine);
      modes[k] = std::sqrt(0.5) * amplitude_[k] * std::complex<double>(re, im);
      modes[partner] = std::conj(modes[k]);
    }
  }
  return dft_inverse(Spectrum{spec_, std::move(modes)});
}

Field sample_field(const CovarianceParams& params, const LatticeSpec& spec, const RngState& rng) {
  return FieldSampler(params, spec).draw(rng);
}

Field lattice_kernel(const CovarianceParams& params, const LatticeSpec& spec) {
  const auto p_sq = spec.momentum_sq_table();
  std::vector<std::complex<double>> symbol(spec.site_count());
  for (std::size_t k = 0; k < symbol.size(); ++k) symbol[k] = params.spectral_density(p_sq[k]);
  return dft_inverse(Spectrum{spec, std::move(symbol)});
}

double kernel_at_origin(const CovarianceParams& params, const LatticeSpec& spec,
                        const kernels::ShellHistogram& hist) {
  check_histogram(spec, hist);
  const double dp = 2.0 * std::numbers::pi / spec.length();
  const double dp2 = dp * dp;
  const double total = kernels::parallel::radial_sum(
      hist, [&](std::int64_t q) { return params.spectral_density(dp2 * static_cast<double>(q)); });
  return total / spec.box_volume();
}

double kernel_at_origin(const CovarianceParams& params, const LatticeSpec& spec) {
  return kernel_at_origin(params, spec, kernels::parallel::shell_histogram(spec.dim(), spec.sites_per_axis()));
}

double pair(const Field& field, const TestFunction& f) {
  if (!(field.spec() == f.spec())) throw Error(Errc::SizeMismatch, "pairing on different lattices");
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) acc += field[i] * f[i];
  return acc * field.spec().cell_volume();
}

double covariance_exact(const TestFunction& f, const TestFunction& g, const CovarianceParams& params) {
  if (!(f.spec() == g.spec())) throw Error(Errc::SizeMismatch, "covariance on different lattices");
  const auto& spec = f.spec();
  const auto fh = dft_forward(f);
  const auto gh = dft_forward(g);
  const auto p_sq = spec.momentum_sq_table();
  double acc = 0.0;
  for (std::size_t k = 0; k < fh.coeffs.size(); ++k)
    acc += params.spectral_density(p_sq[k]) * (fh.coeffs[k] * std::conj(gh.coeffs[k])).real();
  return acc / spec.box_volume();
}

double hs_frobenius_sq(double alpha, const CovarianceParams& params, const LatticeSpec& spec,
                       const kernels::ShellHistogram& hist) {
  check_histogram(spec, hist);
  const double m2 = params.mass() * params.mass();
  const double dp = 2.0 * std::numbers::pi / spec.length();
  const double dp2 = dp * dp;
  const double a2 = spec.spacing() * spec.spacing();
  const double momentum_part = kernels::parallel::radial_sum(hist, [&](std::int64_t q) {
    return std::pow(m2 + dp2 * static_cast<double>(q), -2.0 * alpha);
  });
  const double position_part = kernels::parallel::radial_sum(
      hist, [&](std::int64_t q) { return std::pow(1.0 + a2 * static_cast<double>(q), -2.0 * alpha); });
  return momentum_part / static_cast<double>(spec.site_count()) * position_part;
}

double hs_frobenius_sq(double alpha, const CovarianceParams& params, const LatticeSpec& spec) {
  return hs_frobenius_sq(alpha, params, spec,
                         kernels::parallel::shell_histogram(spec.dim(), spec.sites_per_axis()));
}

Estimate mean_and_stderr(const std::vector<double>& samples) {
  if (samples.empty()) return {};
  // Shifted two-pass: exact for constant data.
  const double shift = samples.front();
  double acc = 0.0;
  for (double v : samples) acc += v - shift;
  const double n = static_cast<double>(samples.size());
  const double mean = shift + acc / n;
  if (samples.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace mlab
