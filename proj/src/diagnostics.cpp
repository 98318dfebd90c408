#include "measurelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "measurelab/error.hpp"

namespace mlab {

namespace {

SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  if (x.size() < 3) return {slope, 0.0};
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    rss += r * r;
  }
  return {slope, std::sqrt(rss / (n - 2.0) / sxx)};
}

void check_sizes(std::span<const SizeValue> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].size > 0.0)) throw Error(Errc::BadGrid, "sizes must be positive");
    if (i > 0 && !(points[i].size > points[i - 1].size)) throw Error(Errc::BadGrid, "sizes must increase strictly");
  }
}

void check_even_sizes(std::span<const int> sizes) {
  if (sizes.size() < 3) throw Error(Errc::BadGrid, "need at least 3 grid sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 4 || sizes[i] % 2 != 0) throw Error(Errc::BadGrid, "N = " + std::to_string(sizes[i]));
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error(Errc::BadGrid, "N list must increase strictly");
  }
}

void check_params(std::span<const double> params) {
  if (params.empty()) throw Error(Errc::BadGrid, "empty parameter list");
  for (double p : params)
    if (!std::isfinite(p)) throw Error(Errc::BadGrid, "parameter is not finite");
}

void check_histogram(const LatticeSpec& spec, const kernels::ShellHistogram& hist) {
  if (hist.dim() != spec.dim() || hist.sites_per_axis() != spec.sites_per_axis())
    throw Error(Errc::SizeMismatch, "shell histogram does not match lattice");
}

ScanSummary summarize(double param, const std::vector<SizeValue>& series) {
  const auto fit = fit_log_slope(series);
  return {param, fit.slope, fit.std_error, increment_rate(series), classify(series)};
}

std::vector<SizeValue> series_for(const ScanResult& scan, double param) {
  std::vector<SizeValue> out;
  for (const auto& p : scan.points)
    if (p.param == param) out.push_back({p.size, p.statistic});
  return out;
}

void finish(ScanResult& scan, std::span<const double> params) {
  for (double param : params) scan.summary.push_back(summarize(param, series_for(scan, param)));
  std::sort(scan.summary.begin(), scan.summary.end(),
            [](const ScanSummary& a, const ScanSummary& b) { return a.param < b.param; });
  scan.threshold = rate_zero_crossing(scan.summary);
}

double envelope_sum(double alpha, const LatticeSpec& spec, const kernels::ShellHistogram& hist) {
  const double a2 = spec.spacing() * spec.spacing();
  return kernels::parallel::radial_sum(
      hist, [&](std::int64_t q) { return std::pow(1.0 + a2 * static_cast<double>(q), -2.0 * alpha); });
}

}  // namespace

SlopeFit fit_log_slope(std::span<const SizeValue> points) {
  if (points.size() < 3) throw Error(Errc::TooFewPoints, "need at least 3 points");
  check_sizes(points);
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.value > 0.0) || !std::isfinite(p.value)) throw Error(Errc::NonpositiveValue, "log of non-positive value");
    x.push_back(std::log(p.size));
    y.push_back(std::log(p.value));
  }
  return least_squares(x, y);
}

std::optional<double> increment_rate(std::span<const SizeValue> points) {
  if (points.size() < 3) return std::nullopt;
  check_sizes(points);
  std::vector<double> x, y;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double dv = points[i + 1].value - points[i].value;
    if (!(dv > 0.0)) return std::nullopt;
    const double dlog = std::log(points[i + 1].size) - std::log(points[i].size);
    x.push_back(0.5 * (std::log(points[i].size) + std::log(points[i + 1].size)));
    y.push_back(std::log(dv / dlog));
  }
  return least_squares(x, y).slope;
}

Verdict classify(std::span<const SizeValue> points) {
  if (const auto rate = increment_rate(points)) {
    if (*rate >= kMarginalBand) return Verdict::Divergent;
    if (*rate <= -kMarginalBand) return Verdict::Convergent;
    return Verdict::Marginal;
  }
  return fit_log_slope(points).slope >= kMarginalBand ? Verdict::Divergent : Verdict::Convergent;
}

bool McCheck::within() const { return std::abs(estimate.mean - exact) <= 3.0 * estimate.std_error; }

std::optional<double> rate_zero_crossing(std::span<const ScanSummary> summary) {
  for (std::size_t i = 0; i + 1 < summary.size(); ++i) {
    const auto& lo = summary[i].rate;
    const auto& hi = summary[i + 1].rate;
    if (!lo || !hi) continue;
    if (*lo > 0.0 && *hi <= 0.0) {
      const double t = *lo / (*lo - *hi);
      return summary[i].param + t * (summary[i + 1].param - summary[i].param);
    }
  }
  return std::nullopt;
}

double uv_statistic(double beta, const CovarianceParams& params, const LatticeSpec& spec,
                    const kernels::ShellHistogram& hist) {
  check_histogram(spec, hist);
  const double m2 = params.mass() * params.mass();
  const double dp = 2.0 * std::numbers::pi / spec.length();
  const double dp2 = dp * dp;
  // (m^2+p^2)^{-2 beta} * 1/(2 sqrt(m^2+p^2))
  const double total = kernels::parallel::radial_sum(hist, [&](std::int64_t q) {
    return 0.5 * std::pow(m2 + dp2 * static_cast<double>(q), -2.0 * beta - 0.5);
  });
  return total / spec.box_volume();
}

double ir_statistic(double alpha, double beta, const CovarianceParams& params, const LatticeSpec& spec,
                    const kernels::ShellHistogram& hist) {
  return uv_statistic(beta, params, spec, hist) * spec.cell_volume() * envelope_sum(alpha, spec, hist);
}

ScanResult uv_scan(const CovarianceParams& params, int dim, double length, std::span<const double> betas,
                   std::span<const int> sizes, const McOptions& mc) {
  check_even_sizes(sizes);
  check_params(betas);
  ScanResult scan{"N", {}, {}, {}, std::nullopt};
  for (int n : sizes) {
    const LatticeSpec spec(dim, n, length);
    const auto hist = kernels::parallel::shell_histogram(dim, n);
    for (double beta : betas) {
      const double s = uv_statistic(beta, params, spec, hist);
      scan.points.push_back({beta, static_cast<double>(n), s, 0.0});
      if (mc.replicas > 0 && spec.site_count() <= mc.max_sites) {
        const auto mult = Multiplier::fractional_resolvent(params.mass(), -beta);
        const auto est = replica_estimate(params, spec, mc.rng, mc.replicas, [&](const Field& phi) {
          return l2_norm_sq(apply_multiplier(phi, mult)) / spec.box_volume();
        });
        scan.mc.push_back({beta, static_cast<double>(n), s, est});
      }
    }
  }
  finish(scan, betas);
  return scan;
}

ScanResult ir_scan(const CovarianceParams& params, int dim, double spacing, std::span<const double> alphas,
                   std::span<const double> lengths, double beta, const McOptions& mc) {
  check_params(alphas);
  if (lengths.size() < 3) throw Error(Errc::BadGrid, "need at least 3 box lengths");
  if (!(spacing > 0.0)) throw Error(Errc::BadGrid, "spacing must be positive");
  if (!(beta > (dim - 1) / 4.0)) throw Error(Errc::BadGrid, "beta must lie above the UV threshold (d-1)/4");
  std::vector<int> sizes;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i > 0 && !(lengths[i] > lengths[i - 1])) throw Error(Errc::BadGrid, "L list must increase strictly");
    const double ratio = lengths[i] / spacing;
    const long n = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio || n < 4 || n % 2 != 0)
      throw Error(Errc::BadGrid, "L/a must be an even integer >= 4");
    sizes.push_back(static_cast<int>(n));
  }
  ScanResult scan{"L", {}, {}, {}, std::nullopt};
  const auto mult = Multiplier::fractional_resolvent(params.mass(), -beta);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const LatticeSpec spec(dim, sizes[i], lengths[i]);
    const auto hist = kernels::parallel::shell_histogram(dim, sizes[i]);
    for (double alpha : alphas) {
      const double v = ir_statistic(alpha, beta, params, spec, hist);
      scan.points.push_back({alpha, lengths[i], v, 0.0});
      if (mc.replicas > 0 && spec.site_count() <= mc.max_sites) {
        const auto est = replica_estimate(params, spec, mc.rng, mc.replicas, [&](const Field& phi) {
          return l2_norm_sq(apply_envelope(apply_multiplier(phi, mult), alpha));
        });
        scan.mc.push_back({alpha, lengths[i], v, est});
      }
    }
  }
  finish(scan, alphas);
  return scan;
}

ScanResult hs_scan(const CovarianceParams& params, int dim, std::span<const double> alphas,
                   std::span<const int> sizes, std::span<const double> lengths) {
  check_even_sizes(sizes);
  check_params(alphas);
  if (lengths.size() != sizes.size()) throw Error(Errc::BadGrid, "N and L lists must pair up");
  for (std::size_t i = 1; i < lengths.size(); ++i)
    if (!(lengths[i] > lengths[i - 1])) throw Error(Errc::BadGrid, "L list must increase strictly");
  ScanResult scan{"N", {}, {}, {}, std::nullopt};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const LatticeSpec spec(dim, sizes[i], lengths[i]);
    const auto hist = kernels::parallel::shell_histogram(dim, sizes[i]);
    for (double alpha : alphas)
      scan.points.push_back({alpha, static_cast<double>(sizes[i]), hs_frobenius_sq(alpha, params, spec, hist), 0.0});
  }
  finish(scan, alphas);
  return scan;
}

std::size_t sites_in_region(const LatticeSpec& spec, const Region& region) {
  std::size_t count = 1;
  for (int axis = 0; axis < spec.dim(); ++axis) {
    std::size_t along = 0;
    for (int j = 0; j < spec.sites_per_axis(); ++j) {
      const double x = spec.coordinate(j);
      if (x >= region.lo[axis] && x < region.hi[axis]) ++along;
    }
    count *= along;
  }
  return count;
}

ProbeResult signed_measure_probe(const CovarianceParams& params, int dim, double length,
                                 std::span<const int> sizes, const Region& region, const McOptions& mc) {
  check_even_sizes(sizes);
  if (static_cast<int>(region.lo.size()) != dim || static_cast<int>(region.hi.size()) != dim)
    throw Error(Errc::EmptyRegion, "region rank != d");
  for (int axis = 0; axis < dim; ++axis) {
    if (!(region.lo[axis] < region.hi[axis])) throw Error(Errc::EmptyRegion, "region has empty extent");
    if (region.lo[axis] < -0.5 * length || region.hi[axis] > 0.5 * length)
      throw Error(Errc::EmptyRegion, "region leaves the box");
  }

  ProbeResult result{{"N", {}, {}, {}, std::nullopt}, Verdict::Convergent, true, 0.0, 0.0};
  std::vector<double> curve;
  for (int n : sizes) {
    const LatticeSpec spec(dim, n, length);
    const std::size_t inside = sites_in_region(spec, region);
    if (inside == 0) throw Error(Errc::EmptyRegion, "no lattice site inside region at N = " + std::to_string(n));
    const double measure = static_cast<double>(inside) * spec.cell_volume();
    const double variance = kernel_at_origin(params, spec);
    const double exact = measure * std::sqrt(2.0 * variance / std::numbers::pi);
    curve.push_back(exact);
    result.scan.points.push_back({params.mass(), static_cast<double>(n), exact, 0.0});

    if (mc.replicas > 0 && spec.site_count() <= mc.max_sites) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < spec.site_count(); ++i) {
        const auto idx = spec.unflatten(i);
        bool in = true;
        for (int axis = 0; axis < dim; ++axis) {
          const double x = spec.coordinate(idx[axis]);
          in = in && x >= region.lo[axis] && x < region.hi[axis];
        }
        if (in) members.push_back(i);
      }
      const auto est = replica_estimate(params, spec, mc.rng, mc.replicas, [&](const Field& phi) {
        double acc = 0.0;
        for (std::size_t i : members) acc += std::abs(phi[i]);
        return acc * spec.cell_volume();
      });
      result.scan.mc.push_back({params.mass(), static_cast<double>(n), exact, est});
      result.max_mc_stderr = std::max(result.max_mc_stderr, est.std_error);
    }
  }

  for (std::size_t i = 1; i < curve.size(); ++i)
    result.strictly_increasing = result.strictly_increasing && curve[i] > curve[i - 1];
  result.total_increase = curve.back() - curve.front();

  std::vector<SizeValue> series;
  for (std::size_t i = 0; i < curve.size(); ++i) series.push_back({static_cast<double>(sizes[i]), curve[i]});
  const auto fit = fit_log_slope(series);
  result.scan.summary.push_back({params.mass(), fit.slope, fit.std_error, increment_rate(series), Verdict::Convergent});

  const bool resolved = result.max_mc_stderr > 0.0 && result.total_increase > 5.0 * result.max_mc_stderr;
  if (result.strictly_increasing && resolved)
    result.verdict = Verdict::Divergent;
  else if (result.strictly_increasing)
    result.verdict = Verdict::Marginal;
  result.scan.summary.back().verdict = result.verdict;
  return result;
}

}  // namespace mlab
