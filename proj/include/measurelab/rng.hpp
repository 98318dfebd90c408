#pragma once

#include <cstdint>
#include <random>

namespace mlab {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A (master seed, stream) pair naming one deterministic random stream.
///
/// The engine is std::mt19937_64 seeded with
///   splitmix64(seed) ^ splitmix64(splitmix64(stream) + 0x632be59bd9b4e019).
/// Replica r of a computation that was handed this state draws from
/// replica(r) = {splitmix64(seed ^ splitmix64(stream)), r}, so replica output
/// never depends on the order in which replicas are executed.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::mt19937_64 engine() const {
    return std::mt19937_64(splitmix64(seed) ^ splitmix64(splitmix64(stream) + 0x632be59bd9b4e019ULL));
  }

  RngState replica(std::uint64_t r) const { return {splitmix64(seed ^ splitmix64(stream)), r}; }
};

}  // namespace mlab
