#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <cmath>

#include "measurelab/kernels.hpp"

using namespace mlab::kernels;

TEST_CASE("shell histogram: serial and parallel agree and count every vector") {
  for (int d = 1; d <= 3; ++d) {
    for (int n : {4, 10, 32}) {
      const auto s = serial::shell_histogram(d, n);
      const auto p = parallel::shell_histogram(d, n);
      CHECK(s == p);
      CHECK(s.total() == static_cast<std::uint64_t>(std::pow(n, d)));
    }
  }
}

TEST_CASE("d=2 shells by hand") {
  // {-2..1}^2: q=0 once, q=1 four times, q=8 once
  const auto h = serial::shell_histogram(2, 4);
  CHECK(h.squares().front() == 0);
  CHECK(h.counts().front() == 1);
  CHECK(h.squares()[1] == 1);
  CHECK(h.counts()[1] == 4);
  CHECK(h.squares().back() == 8);
  CHECK(h.counts().back() == 1);
}

TEST_CASE("radial sums: histogram route equals the direct loop") {
  auto g = [](std::int64_t q) { return std::pow(1.0 + static_cast<double>(q), -0.7); };
  for (int d = 1; d <= 3; ++d) {
    for (int n : {6, 16, 40}) {
      const double direct = serial::radial_sum(d, n, g);
      const double fast = parallel::radial_sum(d, n, g);
      CHECK(fast == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("blocked sum matches serial and is repeatable") {
  auto term = [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i)); };
  const std::size_t n = 100003;
  const double a = parallel::sum(n, term);
  CHECK(a == doctest::Approx(serial::sum(n, term)).epsilon(1e-13));
  CHECK(parallel::sum(n, term) == a);
}

TEST_CASE("map fills slots by index") {
  auto f = [](std::size_t i) { return static_cast<double>(i * i) + 0.5; };
  CHECK(parallel::map(1000, f) == serial::map(1000, f));
}
