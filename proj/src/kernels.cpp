#include "measurelab/kernels.hpp"

#include <map>
#include <numeric>

#include "measurelab/error.hpp"

namespace mlab::kernels {

namespace {

std::size_t shell_count(int dim, int n) {
  const std::size_t h = static_cast<std::size_t>(n / 2);
  return static_cast<std::size_t>(dim) * h * h + 1;
}

void check_box(int dim, int n) {
  if (dim < 1 || dim > 3) throw Error(Errc::BadDimension, "histogram dimension");
  if (n < 2 || n % 2 != 0) throw Error(Errc::OddN, "histogram size");
}

// nu in [-h, h): every |nu| in 1..h-1 twice, 0 and h once.
ShellHistogram one_dimensional(int n) {
  const std::int64_t h = n / 2;
  std::vector<std::int64_t> squares;
  std::vector<std::uint64_t> counts;
  squares.reserve(static_cast<std::size_t>(h) + 1);
  counts.reserve(static_cast<std::size_t>(h) + 1);
  for (std::int64_t a = 0; a <= h; ++a) {
    squares.push_back(a * a);
    counts.push_back(a == 0 || a == h ? 1 : 2);
  }
  return ShellHistogram(1, n, std::move(squares), std::move(counts));
}

}  // namespace

ShellHistogram::ShellHistogram(int dim, int sites_per_axis, const std::vector<std::uint64_t>& dense)
    : dim_(dim), n_(sites_per_axis) {
  for (std::size_t q = 0; q < dense.size(); ++q) {
    if (dense[q] == 0) continue;
    squares_.push_back(static_cast<std::int64_t>(q));
    counts_.push_back(dense[q]);
  }
}

std::uint64_t ShellHistogram::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ShellHistogram serial::shell_histogram(int dim, int n) {
  check_box(dim, n);
  const std::int64_t h = n / 2;
  if (dim == 1) {
    // q = a^2 is too sparse for a dense table at large N
    std::map<std::int64_t, std::uint64_t> shells;
    for (std::int64_t a = -h; a < h; ++a) ++shells[a * a];
    std::vector<std::int64_t> squares;
    std::vector<std::uint64_t> counts;
    for (const auto& [q, c] : shells) {
      squares.push_back(q);
      counts.push_back(c);
    }
    return ShellHistogram(dim, n, std::move(squares), std::move(counts));
  }
  std::vector<std::uint64_t> dense(shell_count(dim, n), 0);
  if (dim == 2) {
    for (std::int64_t a = -h; a < h; ++a)
      for (std::int64_t b = -h; b < h; ++b) ++dense[a * a + b * b];
  } else {
    for (std::int64_t a = -h; a < h; ++a)
      for (std::int64_t b = -h; b < h; ++b)
        for (std::int64_t c = -h; c < h; ++c) ++dense[a * a + b * b + c * c];
  }
  return ShellHistogram(dim, n, dense);
}

ShellHistogram parallel::shell_histogram(int dim, int n) {
  check_box(dim, n);
  if (dim == 1) return one_dimensional(n);

  const std::size_t shells = shell_count(dim, n);
  const std::int64_t h = n / 2;

  // Histogram of the trailing d-1 axes; the leading axis then shifts it by a^2.
  const auto tail_hist = dim == 2 ? one_dimensional(n) : parallel::shell_histogram(2, n);
  const auto tail_q = tail_hist.squares();
  const auto tail_c = tail_hist.counts();

  std::vector<std::uint64_t> dense(shells, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(shells, 0);
#pragma omp for schedule(static)
    for (std::int64_t a = -h; a < h; ++a) {
      const std::int64_t a2 = a * a;
      for (std::size_t i = 0; i < tail_q.size(); ++i) local[static_cast<std::size_t>(a2 + tail_q[i])] += tail_c[i];
    }
#pragma omp critical
    for (std::size_t q = 0; q < shells; ++q) dense[q] += local[q];
  }
  return ShellHistogram(dim, n, dense);
}

}  // namespace mlab::kernels
