#pragma once

#include <cstdint>
#include <random>

namespace waggle {

// All stochastic code in this project draws through these helpers so that a
// given seed produces the same stream on every build. std::mt19937_64 is
// fully specified by the standard; the distribution adaptors below avoid
// std::uniform_*_distribution, whose output is implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic sub-seed for run (a, b) of a sweep, so results do not depend
// on execution order.
inline std::uint64_t derive_seed(std::uint64_t global, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(global ^ (a * 0xD1342543DE82EF95ULL)) ^ b);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection-free multiply-shift; the bias of at
// most n / 2^64 is irrelevant at the scales used here.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace waggle
