// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0
//
// std::mt19937_64 produces the same stream everywhere, but the standard
// distributions do not; these mappings keep seeded outputs portable.

#ifndef MPI_FORGE_RANDOM_HPP
#define MPI_FORGE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <utility>

namespace mpi_forge {

using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform in [0, n) without modulo bias. n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Fisher-Yates.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) std::swap(first[i - 1], first[uniform_index(rng, i)]);
}

}  // namespace mpi_forge

#endif  // MPI_FORGE_RANDOM_HPP
