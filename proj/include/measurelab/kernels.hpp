#pragma once

// Data-parallel inner loops. Every kernel in `parallel` has a plain loop in
// `serial` computing the same quantity; the serial versions are kept as the
// reference the tests and the benchmark compare against.
//
// Parallel reductions are blocked with a block size that does not depend on the
// thread count, and block partials are combined in block order, so results are
// bit-identical for any OMP_NUM_THREADS.

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlab::kernels {

inline constexpr std::size_t kBlock = 1024;

/// Number of integer vectors nu in [-N/2, N/2)^d with |nu|^2 = q, for every q.
///
/// Both lattice coordinates x/a and lattice frequencies nu range over the same
/// integer box, so every radial sum over sites or modes is a weighted sum over
/// this histogram.
class ShellHistogram {
 public:
  /// From a dense table indexed by q; empty shells are dropped.
  ShellHistogram(int dim, int sites_per_axis, const std::vector<std::uint64_t>& dense);
  ShellHistogram(int dim, int sites_per_axis, std::vector<std::int64_t> squares, std::vector<std::uint64_t> counts)
      : dim_(dim), n_(sites_per_axis), squares_(std::move(squares)), counts_(std::move(counts)) {}

  int dim() const { return dim_; }
  int sites_per_axis() const { return n_; }
  /// Occupied shells in increasing q, with their multiplicities.
  std::span<const std::int64_t> squares() const { return squares_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::size_t shells() const { return squares_.size(); }
  std::uint64_t total() const;

  bool operator==(const ShellHistogram& other) const = default;

 private:
  int dim_;
  int n_;
  std::vector<std::int64_t> squares_;
  std::vector<std::uint64_t> counts_;
};

namespace serial {

template <class F>
double sum(std::size_t count, F&& term) {
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += term(i);
  return acc;
}

/// Direct loop over all vectors of the box, g evaluated once per vector.
template <class G>
double radial_sum(int dim, int n, G&& g) {
  const int h = n / 2;
  double acc = 0.0;
  if (dim == 1) {
    for (int a = -h; a < h; ++a) acc += g(static_cast<std::int64_t>(a) * a);
  } else if (dim == 2) {
    for (int a = -h; a < h; ++a)
      for (int b = -h; b < h; ++b) acc += g(static_cast<std::int64_t>(a) * a + std::int64_t(b) * b);
  } else {
    for (int a = -h; a < h; ++a)
      for (int b = -h; b < h; ++b)
        for (int c = -h; c < h; ++c)
          acc += g(static_cast<std::int64_t>(a) * a + std::int64_t(b) * b + std::int64_t(c) * c);
  }
  return acc;
}

ShellHistogram shell_histogram(int dim, int n);

template <class F>
auto map(std::size_t count, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(f(i));
  return out;
}

}  // namespace serial

namespace parallel {

template <class F>
double sum(std::size_t count, F&& term) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < count ? lo + kBlock : count;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

/// Histogram built with per-thread private counts; integer merge is exact.
ShellHistogram shell_histogram(int dim, int n);

/// sum_q count[q] g(q) over occupied shells.
template <class G>
double radial_sum(const ShellHistogram& hist, G&& g) {
  const auto squares = hist.squares();
  const auto counts = hist.counts();
  return sum(squares.size(), [&](std::size_t i) { return static_cast<double>(counts[i]) * g(squares[i]); });
}

template <class G>
double radial_sum(int dim, int n, G&& g) {
  return radial_sum(shell_histogram(dim, n), g);
}

/// out[i] = f(i); the output slot is fixed by i so the result is order-free.
template <class F>
auto map(std::size_t count, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  return out;
}

}  // namespace parallel

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mlab::kernels
