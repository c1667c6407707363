#pragma once

#include <cstdint>
#include <random>

namespace shapeval {

using Rng = std::mt19937_64;

// SplitMix64-style mixing; derives independent stream seeds from a master
// seed so Monte Carlo trials stay reproducible under any evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Inclusive on both ends.
inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline int poisson(Rng& rng, double rate) {
  return std::poisson_distribution<int>(rate)(rng);
}

}  // namespace shapeval
