#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace sbrl {

// Draw helpers built directly on mt19937_64 output words. The standard
// distributions are implementation-defined in how they consume the engine,
// which would break cross-platform reproducibility of traces and CSVs.

// Uniform integer in [0, n). n >= 1. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
  std::uint64_t x = rng();
  while (rem != 0 && x > max - rem) x = rng();
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sbrl
