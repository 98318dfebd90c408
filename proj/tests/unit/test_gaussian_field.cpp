#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <cmath>
#include <numbers>

#include "acceptance.hpp"
#include "measurelab/gaussian_field.hpp"

using namespace mlab;
using std::numbers::pi;

namespace {

// K0(x) = int_0^inf exp(-x cosh t) dt, trapezoid rule (exponentially accurate).
double k0_quadrature(double x) {
  const double h = 1e-3;
  double acc = 0.5 * std::exp(-x);
  for (int i = 1; i < 20000; ++i) acc += std::exp(-x * std::cosh(i * h));
  return acc * h;
}

// L^-d sum_p sigma(p) by explicit loops over momenta.
double mode_sum_origin(double mass, const LatticeSpec& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.site_count(); ++i) acc += 0.5 / std::sqrt(mass * mass + s.momentum_sq(i));
  return acc / s.box_volume();
}

}  // namespace

TEST_CASE("mass must be positive") {
  CHECK_ERRC(CovarianceParams(0.0), Errc::NonpositiveMass);
  CHECK_ERRC(CovarianceParams(-1.0), Errc::NonpositiveMass);
  CHECK_ERRC(CovarianceParams(NAN), Errc::NonpositiveMass);
  CHECK(CovarianceParams(2.0).spectral_density(0.0) == 0.25);
}

TEST_CASE("Bessel oracle against quadrature") {
  for (double x : {0.3, 1.0, 2.5, 4.0})
    CHECK(acceptance::oracle::continuum_kernel_1d(x, 1.0) == doctest::Approx(k0_quadrature(x) / (2 * pi)).epsilon(1e-9));
}

TEST_CASE("kernel at the origin: histogram route, FFT route, direct loop") {
  const CovarianceParams params(0.7);
  for (int d = 1; d <= 3; ++d) {
    const auto s = make_lattice(d, 16, 5.0);
    const double hist = kernel_at_origin(params, s);
    CHECK(lattice_kernel(params, s)[s.origin_index()] == doctest::Approx(hist).epsilon(1e-12));
    CHECK(mode_sum_origin(0.7, s) == doctest::Approx(hist).epsilon(1e-12));
  }
}

TEST_CASE("C_N(0) increases with N and the d=1 increment tends to ln2/(2 pi)") {
  const CovarianceParams params(1.0);
  for (int d = 1; d <= 3; ++d) {
    double prev = 0.0;
    for (int n = 8; n <= (d == 3 ? 64 : 256); n *= 2) {
      const double c = kernel_at_origin(params, make_lattice(d, n, 8.0));
      CHECK(c > prev);
      prev = c;
    }
  }
  const double inc = kernel_at_origin(params, make_lattice(1, 8192, 64.0)) -
                     kernel_at_origin(params, make_lattice(1, 4096, 64.0));
  CHECK(inc == doctest::Approx(std::log(2.0) / (2 * pi)).epsilon(0.05));
}

TEST_CASE("large mass: C(0) -> 1 / (2 m a^d)") {
  const auto s = make_lattice(1, 64, 16.0);
  const double m = 1000.0;
  CHECK(kernel_at_origin(CovarianceParams(m), s) * 2 * m * s.spacing() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sampler determinism") {
  const CovarianceParams params(1.0);
  const auto s = make_lattice(2, 16, 4.0);
  const FieldSampler sampler(params, s);
  const RngState rng{42, 3};
  const auto a = sample_field(params, s, rng);
  const auto b = sampler.draw(rng);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const auto c = sample_field(params, s, RngState{43, 3});
  CHECK(c[0] != a[0]);
}

TEST_CASE("one-point statistics over 1e4 replicas") {
  const CovarianceParams params(1.0);
  const auto s = make_lattice(1, 64, 16.0);
  const RngState rng{7, 0};
  const std::size_t reps = 10000;
  const std::size_t x = s.origin_index() + 5;
  const auto mean = replica_estimate(params, s, rng, reps, [&](const Field& f) { return f[x]; });
  CHECK(std::abs(mean.mean) <= 4 * mean.std_error);

  const double exact = mode_sum_origin(1.0, s);
  const auto var = replica_estimate(params, s, rng, reps, [&](const Field& f) { return f[x] * f[x]; });
  CHECK(std::abs(var.mean - exact) <= 3 * var.std_error);

  // standardized fourth moment of a Gaussian is 3
  const auto m4 = replica_estimate(params, s, rng, reps, [&](const Field& f) {
    const double z = f[x] / std::sqrt(exact);
    return z * z * z * z;
  });
  CHECK(std::abs(m4.mean - 3.0) <= 3 * m4.std_error);
}

TEST_CASE("sampled covariance on four sites matches the lattice kernel") {
  const CovarianceParams params(1.0);
  const auto s = make_lattice(1, 32, 8.0);
  const auto kernel = lattice_kernel(params, s);
  const int n = s.sites_per_axis();
  const int sites[4] = {3, 10, 11, 20};
  auto kernel_between = [&](int i, int j) { return kernel[((i - j + n) % n + n / 2) % n]; };
  const RngState rng{99, 0};
  double chi2 = 0.0;
  int dof = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const auto est = replica_estimate(params, s, rng, 10000,
                                        [&](const Field& f) { return f[sites[a]] * f[sites[b]]; });
      const double z = (est.mean - kernel_between(sites[a], sites[b])) / est.std_error;
      chi2 += z * z;
      ++dof;
    }
  // 3 sigma above the chi-square mean
  CHECK(chi2 <= dof + 3 * std::sqrt(2.0 * dof));
}

TEST_CASE("pair") {
  const auto s = make_lattice(2, 8, 4.0);
  const auto phi = sample_field(CovarianceParams(1.0), s, RngState{1, 0});
  CHECK(pair(phi, Field(s)) == 0.0);
  Field f(s);
  f[17] = 1.0;
  CHECK(pair(phi, f) == doctest::Approx(s.cell_volume() * phi[17]));
}

TEST_CASE("covariance_exact") {
  const double length = 10.0, mass = 1.4;
  const auto s = make_lattice(1, 32, length);
  const CovarianceParams params(mass);
  auto cosine = [&](int k) {
    Field f(s);
    for (int j = 0; j < 32; ++j) f[j] = std::cos(2 * pi * k / length * s.coordinate(j));
    return f;
  };
  const double p1 = 2 * pi / length;
  const auto c1 = cosine(1), c3 = cosine(3);
  CHECK(covariance_exact(c1, c1, params) == doctest::Approx(length / 2 * params.spectral_density(p1 * p1)));
  CHECK(std::abs(covariance_exact(c1, c3, params)) < 1e-12);

  const auto f = sample_field(params, s, RngState{2, 0});
  const auto g = sample_field(params, s, RngState{3, 0});
  CHECK(covariance_exact(f, g, params) == doctest::Approx(covariance_exact(g, f, params)).epsilon(1e-13));
  Field h(s);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 2 * f[i] + 3 * g[i];
  CHECK(covariance_exact(h, c1, params) ==
        doctest::Approx(2 * covariance_exact(f, c1, params) + 3 * covariance_exact(g, c1, params)).epsilon(1e-10));
}

TEST_CASE("hs_frobenius_sq: dense oracle and monotone in alpha") {
  const CovarianceParams params(1.0);
  for (int d = 1; d <= 2; ++d)
    for (double alpha : {0.2, 0.6}) {
      const auto s = make_lattice(d, 4, 3.0);
      CHECK(hs_frobenius_sq(alpha, params, s) ==
            doctest::Approx(acceptance::oracle::dense_hs_frobenius_sq(d, 4, 3.0, alpha, 1.0)).epsilon(1e-8));
    }
  const auto s = make_lattice(2, 32, 16.0);
  double prev = INFINITY;
  for (double alpha = 0.0; alpha <= 1.5; alpha += 0.25) {
    const double v = hs_frobenius_sq(alpha, params, s);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("histogram of the wrong lattice is rejected") {
  const auto s = make_lattice(1, 16, 4.0);
  const auto hist = kernels::serial::shell_histogram(1, 8);
  CHECK_ERRC(kernel_at_origin(CovarianceParams(1.0), s, hist), Errc::SizeMismatch);
}

TEST_CASE("replica estimates do not depend on the thread count") {
  const CovarianceParams params(1.0);
  const auto s = make_lattice(2, 16, 4.0);
  auto run = [&] {
    return replica_estimate(params, s, RngState{21, 0}, 300, [](const Field& f) { return l2_norm_sq(f); });
  };
  omp_set_num_threads(1);
  const auto one = run();
  omp_set_num_threads(3);
  const auto three = run();
  CHECK(one.mean == three.mean);
  CHECK(one.std_error == three.std_error);
  CHECK(kernels::parallel::shell_histogram(3, 24) == kernels::serial::shell_histogram(3, 24));
}
