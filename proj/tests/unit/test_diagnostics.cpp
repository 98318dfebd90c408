#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <cmath>
#include <numbers>

#include "measurelab/diagnostics.hpp"

using namespace mlab;

namespace {

std::vector<SizeValue> series(const std::vector<double>& sizes, double (*f)(double)) {
  std::vector<SizeValue> out;
  for (double s : sizes) out.push_back({s, f(s)});
  return out;
}

const ScanSummary& row(const ScanResult& r, double param) {
  for (const auto& s : r.summary)
    if (std::abs(s.param - param) < 1e-12) return s;
  FAIL("no summary row");
  return r.summary.front();
}

// Independent oracle for the HS factor sums: explicit loops over momenta and sites.
double hs_direct(int d, int n, double length, double alpha, double mass) {
  const auto s = make_lattice(d, n, length);
  double mom = 0.0, env = 0.0;
  for (std::size_t i = 0; i < s.site_count(); ++i) {
    mom += std::pow(mass * mass + s.momentum_sq(i), -2 * alpha);
    env += std::pow(1.0 + s.position_sq(i), -2 * alpha);
  }
  return mom / s.site_count() * env;
}

}  // namespace

TEST_CASE("fit_log_slope") {
  const std::vector<double> sizes = {8, 16, 32, 64, 128};
  const auto power = series(sizes, [](double s) { return 2.5 * std::pow(s, 1.5); });
  CHECK(fit_log_slope(power).slope == doctest::Approx(1.5).epsilon(1e-10));
  const auto flat = series(sizes, [](double) { return 4.0; });
  CHECK(std::abs(fit_log_slope(flat).slope) < 1e-14);
  CHECK(classify(flat) == Verdict::Convergent);

  CHECK_ERRC(fit_log_slope(std::span(power).first(2)), Errc::TooFewPoints);
  auto bad = power;
  bad[2].value = -1.0;
  CHECK_ERRC(fit_log_slope(bad), Errc::NonpositiveValue);
  bad = power;
  bad[2].size = bad[1].size;
  CHECK_ERRC(fit_log_slope(bad), Errc::BadGrid);
}

TEST_CASE("log growth is MARGINAL, its slope decays with the grid") {
  const auto small = series({8, 16, 32, 64}, [](double s) { return std::log(s); });
  const auto large = series({1024, 2048, 4096, 8192}, [](double s) { return std::log(s); });
  CHECK(classify(small) == Verdict::Marginal);
  CHECK(classify(large) == Verdict::Marginal);
  CHECK(fit_log_slope(large).slope < fit_log_slope(small).slope);
  CHECK(fit_log_slope(small).slope > 0.0);
  CHECK(std::abs(*increment_rate(large)) < 1e-12);
}

TEST_CASE("increment rate sees the exponent on both sides") {
  const std::vector<double> sizes = {16, 32, 64, 128, 256};
  CHECK(*increment_rate(series(sizes, [](double s) { return 3 + std::pow(s, 0.4); })) == doctest::Approx(0.4));
  CHECK(*increment_rate(series(sizes, [](double s) { return 3 - std::pow(s, -0.4); })) == doctest::Approx(-0.4));
  CHECK(classify(series(sizes, [](double s) { return 3 - std::pow(s, -0.4); })) == Verdict::Convergent);
  CHECK(classify(series(sizes, [](double s) { return std::pow(s, 0.4); })) == Verdict::Divergent);
  CHECK(!increment_rate(series(sizes, [](double s) { return 2 + std::sin(s); })).has_value());
}

TEST_CASE("rate_zero_crossing interpolates") {
  std::vector<ScanSummary> rows = {{0.0, 0, 0, 0.4, Verdict::Divergent},
                                   {0.1, 0, 0, 0.2, Verdict::Divergent},
                                   {0.2, 0, 0, -0.2, Verdict::Convergent}};
  CHECK(*rate_zero_crossing(rows) == doctest::Approx(0.15));
  rows.pop_back();
  CHECK(!rate_zero_crossing(rows).has_value());
}

TEST_CASE("McCheck::within") {
  CHECK(McCheck{0, 0, 1.0, {1.29, 0.1}}.within());
  CHECK(!McCheck{0, 0, 1.0, {1.31, 0.1}}.within());
}

TEST_CASE("uv_scan slopes") {
  const CovarianceParams m1(1.0);
  const std::vector<int> sizes = {64, 128, 256, 512};
  const std::vector<double> d2 = {0.1};
  CHECK(uv_scan(m1, 2, 2.0, d2, sizes).summary[0].slope == doctest::Approx(0.6).epsilon(0.1 / 0.6));

  const std::vector<double> d1 = {0.3};
  CHECK(std::abs(uv_scan(m1, 1, 2.0, d1, sizes).summary[0].slope) < 0.05);

  const std::vector<int> s3 = {32, 64, 128, 256};
  const std::vector<double> d3 = {0.25, 0.75};
  const auto r3 = uv_scan(m1, 3, 2.0, d3, s3);
  CHECK(std::abs(row(r3, 0.75).slope) < 0.1);
  CHECK(std::abs(row(r3, 0.25).slope - 1.0) < 0.15);
  CHECK(row(r3, 0.25).verdict == Verdict::Divergent);
  CHECK(row(r3, 0.75).verdict == Verdict::Convergent);
}

TEST_CASE("uv_statistic against a direct loop and Monte Carlo") {
  const CovarianceParams params(1.0);
  const auto s = make_lattice(2, 16, 2.0);
  const auto hist = kernels::serial::shell_histogram(2, 16);
  double direct = 0.0;
  for (std::size_t i = 0; i < s.site_count(); ++i) {
    const double q = 1.0 + s.momentum_sq(i);
    direct += std::pow(q, -0.4) * 0.5 / std::sqrt(q);
  }
  direct /= s.box_volume();
  CHECK(uv_statistic(0.2, params, s, hist) == doctest::Approx(direct).epsilon(1e-12));

  const std::vector<double> betas = {0.2};
  const std::vector<int> sizes = {8, 16, 32};
  const auto r = uv_scan(params, 2, 2.0, betas, sizes, McOptions{2000, RngState{5, 0}, 4096});
  CHECK(r.mc.size() == 3);
  for (const auto& mc : r.mc) CHECK(mc.within());
}

TEST_CASE("uv_scan grid validation") {
  const CovarianceParams params(1.0);
  const std::vector<double> b = {0.1};
  const std::vector<int> two = {8, 16}, odd = {8, 15, 32}, down = {32, 16, 8};
  CHECK_ERRC(uv_scan(params, 1, 2.0, b, two), Errc::BadGrid);
  CHECK_ERRC(uv_scan(params, 1, 2.0, b, odd), Errc::BadGrid);
  CHECK_ERRC(uv_scan(params, 1, 2.0, b, down), Errc::BadGrid);
}

TEST_CASE("ir_scan slopes") {
  const CovarianceParams params(1.0);
  const std::vector<double> lengths = {32, 64, 128, 256, 512};
  const std::vector<double> alphas = {0.1, 0.5};
  const auto r = ir_scan(params, 1, 0.5, alphas, lengths, 0.5);
  CHECK(std::abs(row(r, 0.5).slope) < 0.05);
  CHECK(std::abs(row(r, 0.1).slope - 0.6) < 0.1);

  const std::vector<double> boundary = {0.5};
  const std::vector<double> l2 = {16, 32, 64, 128, 256};
  CHECK(ir_scan(params, 2, 0.5, boundary, l2, 0.75).summary[0].verdict == Verdict::Marginal);

  CHECK_ERRC(ir_scan(params, 2, 0.5, boundary, l2, 0.25), Errc::BadGrid);
  const std::vector<double> uneven = {16, 32.3, 64};
  CHECK_ERRC(ir_scan(params, 1, 0.5, boundary, uneven, 0.5), Errc::BadGrid);
}

TEST_CASE("ir_statistic Monte-Carlo route") {
  const CovarianceParams params(1.0);
  const std::vector<double> alphas = {0.4};
  const std::vector<double> lengths = {4, 8, 16};
  const auto r = ir_scan(params, 1, 0.5, alphas, lengths, 0.5, McOptions{2000, RngState{8, 0}, 1024});
  CHECK(r.mc.size() == 3);
  for (const auto& mc : r.mc) CHECK(mc.within());
}

TEST_CASE("hs_scan") {
  const CovarianceParams params(1.0);
  const std::vector<int> sizes = {64, 128, 256, 512, 1024, 2048};
  const std::vector<double> lengths(sizes.begin(), sizes.end());
  const std::vector<double> alphas = {0.125, 0.5};
  const auto r = hs_scan(params, 1, alphas, sizes, lengths);
  CHECK(std::abs(row(r, 0.5).slope) < 0.05);
  CHECK(row(r, 0.125).slope > 0.3);
  CHECK(row(r, 0.125).verdict == Verdict::Divergent);
  for (const auto& p : r.points)
    CHECK(p.statistic == doctest::Approx(hs_direct(1, static_cast<int>(p.size), p.size, p.param, 1.0)).epsilon(1e-10));
}

TEST_CASE("signed-measure probe") {
  const CovarianceParams params(1.0);
  const std::vector<int> sizes = {64, 128, 256, 512};
  const Region u{{-1.0}, {1.0}};
  const auto probe = signed_measure_probe(params, 1, 16.0, sizes, u, McOptions{1000, RngState{3, 0}, 1 << 16});
  CHECK(probe.verdict == Verdict::Divergent);
  CHECK(probe.strictly_increasing);
  double prev = 0.0;
  for (const auto& p : probe.scan.points) {
    const auto s = make_lattice(1, static_cast<int>(p.size), 16.0);
    const double sites = static_cast<double>(sites_in_region(s, u));
    const double closed = sites * s.spacing() * std::sqrt(2 * kernel_at_origin(params, s) / std::numbers::pi);
    CHECK(p.statistic == doctest::Approx(closed).epsilon(1e-12));
    CHECK(p.statistic > prev);
    prev = p.statistic;
  }
  CHECK(probe.scan.mc.size() == sizes.size());
  for (const auto& mc : probe.scan.mc) CHECK(mc.within());
}

TEST_CASE("probe regions") {
  const CovarianceParams params(1.0);
  const std::vector<int> sizes = {64, 128, 256};
  const McOptions none{};
  CHECK(sites_in_region(make_lattice(1, 16, 16.0), Region{{-1.0}, {1.0}}) == 2);
  CHECK_ERRC(signed_measure_probe(params, 1, 16.0, sizes, Region{{1.0}, {1.0}}, none), Errc::EmptyRegion);
  CHECK_ERRC(signed_measure_probe(params, 1, 16.0, sizes, Region{{-1.0, 0.0}, {1.0, 1.0}}, none), Errc::EmptyRegion);
  CHECK_ERRC(signed_measure_probe(params, 1, 16.0, sizes, Region{{5.0}, {9.5}}, none), Errc::EmptyRegion);
}
