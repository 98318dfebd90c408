// Serial reference kernels against their OpenMP versions.
//   bench_kernels [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "measurelab/gaussian_field.hpp"
#include "measurelab/kernels.hpp"

using namespace mlab;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
  std::printf("%-34s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  |diff| %.1e\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, diff);
}

volatile double sink;

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::stoi(argv[1]) : 3;
  std::printf("threads: %d\n", kernels::max_threads());
  auto g = [](std::int64_t q) { return std::pow(1.0 + static_cast<double>(q), -0.6); };

  for (auto [d, n] : {std::pair{1, 1 << 20}, std::pair{2, 1024}, std::pair{3, 128}}) {
    kernels::ShellHistogram hs = kernels::serial::shell_histogram(d, n), hp = hs;
    const double ts = best_ms(repeats, [&] { hs = kernels::serial::shell_histogram(d, n); });
    const double tp = best_ms(repeats, [&] { hp = kernels::parallel::shell_histogram(d, n); });
    report(("shell_histogram d=" + std::to_string(d) + " N=" + std::to_string(n)).c_str(), ts, tp, hs == hp ? 0.0 : 1.0);

    double vs = 0.0, vp = 0.0;
    const double rs = best_ms(repeats, [&] { vs = kernels::serial::radial_sum(d, n, g); });
    const double rp = best_ms(repeats, [&] { vp = kernels::parallel::radial_sum(hp, g); });
    report(("radial_sum d=" + std::to_string(d) + " (direct vs shells)").c_str(), rs, rp, std::abs(vs - vp) / vs);
  }

  const CovarianceParams params(1.0);
  const auto spec = make_lattice(2, 128, 16.0);
  const FieldSampler sampler(params, spec);
  const RngState rng{1, 0};
  auto stat = [&](std::size_t r) { return l2_norm_sq(sampler.draw(rng.replica(r))); };
  std::vector<double> a, b;
  const double ms = best_ms(repeats, [&] { a = kernels::serial::map(64, stat); });
  const double mp = best_ms(repeats, [&] { b = kernels::parallel::map(64, stat); });
  report("map: 64 samples d=2 N=128", ms, mp, a == b ? 0.0 : 1.0);
  sink = a[0] + b[0];
  return 0;
}
