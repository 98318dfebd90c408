#pragma once

// Threshold scans locating where lattice statistics stop growing with the
// cutoff. Every statistic here is an exact expectation evaluated by mode sums;
// Monte-Carlo runs are optional confirmations.
//
// Growth is judged by two numbers per parameter value:
//   slope  least-squares slope of log V against log size
//   rate   least-squares slope of log(dV/dlog size) against log mid-size
// For V ~ A s^k + B the rate is k; for V ~ C - c s^-k it is -k; for log growth
// it is 0. The rate therefore changes sign exactly at the threshold, while the
// slope only decays to zero on the convergent side.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "measurelab/gaussian_field.hpp"

namespace mlab {

enum class Verdict { Convergent, Divergent, Marginal };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "CONVERGENT";
    case Verdict::Divergent: return "DIVERGENT";
    case Verdict::Marginal: return "MARGINAL";
  }
  return "UNKNOWN";
}

/// Rates within this band of zero are MARGINAL.
inline constexpr double kMarginalBand = 0.1;

struct SizeValue {
  double size;
  double value;
};

struct SlopeFit {
  double slope;
  double std_error;
};

/// Least-squares slope of log value vs log size. Needs >= 3 points, strictly
/// increasing positive sizes, positive values.
SlopeFit fit_log_slope(std::span<const SizeValue> points);

/// Fitted exponent of the increments; nullopt unless every increment is positive.
std::optional<double> increment_rate(std::span<const SizeValue> points);

/// DIVERGENT / CONVERGENT / MARGINAL from the rate (falls back to the slope
/// when the series is not monotone).
Verdict classify(std::span<const SizeValue> points);

struct ScanPoint {
  double param;
  double size;
  double statistic;
  double std_error;  // 0 for exact rows
};

struct McCheck {
  double param;
  double size;
  double exact;
  Estimate estimate;

  /// |estimate - exact| <= 3 stderr.
  bool within() const;
};

struct ScanSummary {
  double param;
  double slope;
  double slope_err;
  std::optional<double> rate;
  Verdict verdict;
};

struct ScanResult {
  std::string axis;  // "N" or "L"
  std::vector<ScanPoint> points;
  std::vector<ScanSummary> summary;
  std::vector<McCheck> mc;
  /// Parameter value where the rate crosses zero (linear interpolation).
  std::optional<double> threshold;
};

/// Linear interpolation of the first positive-to-nonpositive change of rate in
/// a summary sorted by parameter.
std::optional<double> rate_zero_crossing(std::span<const ScanSummary> summary);

struct McOptions {
  std::size_t replicas = 0;  // 0 disables sampling
  RngState rng{};
  std::size_t max_sites = std::size_t{1} << 16;  // skip grid points larger than this
};

/// S(beta, N) = L^-d sum_p (m^2+|p|^2)^{-2 beta} sigma(p)
///            = E[ l2_norm_sq((m^2-Delta)^{-beta} phi) ] / L^d.
double uv_statistic(double beta, const CovarianceParams& params, const LatticeSpec& spec,
                    const kernels::ShellHistogram& hist);

/// M(alpha, L) = S(beta) * a^d sum_x (1+|x|^2)^{-2 alpha}
///             = E[ l2_norm_sq(envelope((m^2-Delta)^{-beta} phi, alpha)) ].
double ir_statistic(double alpha, double beta, const CovarianceParams& params, const LatticeSpec& spec,
                    const kernels::ShellHistogram& hist);

/// UV refinement at fixed L over sizes N; throws BAD_GRID.
ScanResult uv_scan(const CovarianceParams& params, int dim, double length, std::span<const double> betas,
                   std::span<const int> sizes, const McOptions& mc = {});

/// IR growth at fixed spacing a over box lengths L (N = L/a must be even).
ScanResult ir_scan(const CovarianceParams& params, int dim, double spacing, std::span<const double> alphas,
                   std::span<const double> lengths, double beta, const McOptions& mc = {});

/// hs_frobenius_sq over paired grids (N_i, L_i), both strictly increasing. The
/// size axis is N.
ScanResult hs_scan(const CovarianceParams& params, int dim, std::span<const double> alphas,
                   std::span<const int> sizes, std::span<const double> lengths);

/// Half-open coordinate box [lo_i, hi_i).
struct Region {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct ProbeResult {
  ScanResult scan;  // param column holds the mass; statistic = exact curve
  Verdict verdict;
  bool strictly_increasing;
  double total_increase;
  double max_mc_stderr;  // 0 when no Monte-Carlo point was run
};

/// Exact E[ a^d sum_{x in U} |phi(x)| ] = |U|_lattice sqrt(2 C_N(0) / pi) over
/// sizes N at fixed L, plus Monte-Carlo confirmation where the lattice is small
/// enough. DIVERGENT iff the curve rises at every refinement and the total rise
/// exceeds 5 Monte-Carlo standard errors.
ProbeResult signed_measure_probe(const CovarianceParams& params, int dim, double length,
                                 std::span<const int> sizes, const Region& region, const McOptions& mc);

/// Number of lattice sites of spec inside region.
std::size_t sites_in_region(const LatticeSpec& spec, const Region& region);

}  // namespace mlab
