#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace rz {

/// Uniform double in [0, 1) from the top 53 bits, identical on every standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Slight modulo bias is irrelevant at these sizes.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

/// Draws an index with probability proportional to `weights`.
std::size_t sample_index(std::span<const double> weights, std::mt19937_64& rng);

}  // namespace rz
