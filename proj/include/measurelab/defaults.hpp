#pragma once

// Default grids for the threshold scans. All statistics are exact mode sums, so
// the grids are chosen for a clean asymptotic regime, not for cost.
//
// UV: slopes depend on m and L only through m L; L = 2 keeps the divergent-side
//     slopes within 0.15 of d-1-4 beta and the convergent-side ones below 0.05
//     for every m in [0.5, 2].
// IR / HS: fixed spacing while L grows, so only the envelope sum diverges and
//     the growth exponent is exactly d - 4 alpha.

#include <cstddef>
#include <vector>

namespace mlab::defaults {

inline constexpr double kUvLength = 2.0;

inline std::vector<int> doublings(int first, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(first << i);
  return out;
}

inline std::vector<int> uv_sizes(int dim) {
  if (dim == 1) return doublings(64, 5);   // 64..1024
  if (dim == 2) return doublings(64, 4);   // 64..512
  return doublings(32, 4);                 // 32..256
}

inline double ir_spacing(int dim) { return dim == 3 ? 1.0 : 0.5; }

inline std::vector<double> ir_lengths(int dim) {
  const int first = dim == 1 ? 32 : 16;
  const int count = dim == 3 ? 4 : 5;
  std::vector<double> out;
  for (int n : doublings(first, count)) out.push_back(n);
  return out;
}

/// Half a unit above the UV threshold (d-1)/4.
inline double ir_beta(int dim) { return (dim - 1) / 4.0 + 0.5; }

inline std::vector<int> hs_sizes(int dim) {
  if (dim == 1) return doublings(64, 6);
  if (dim == 2) return doublings(32, 6);
  return doublings(16, 6);
}

/// Paired box lengths for hs_sizes: spacing 1.
inline std::vector<double> hs_lengths(const std::vector<int>& sizes) {
  return std::vector<double>(sizes.begin(), sizes.end());
}

inline constexpr double kProbeLength = 16.0;

/// Six sizes, five doublings.
inline std::vector<int> probe_sizes(int dim) {
  if (dim == 1) return doublings(64, 6);
  if (dim == 2) return doublings(32, 6);
  return doublings(16, 6);
}

inline constexpr std::size_t kProbeReplicas = 1000;

/// Parameter grid centre +- 0.3 in steps of 0.05.
inline std::vector<double> parameter_grid(double centre) {
  std::vector<double> out;
  for (int i = -6; i <= 6; ++i) out.push_back(centre + 0.05 * i);
  return out;
}

}  // namespace mlab::defaults
