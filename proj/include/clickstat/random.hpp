#pragma once

#include <cstdint>
#include <random>

namespace clickstat {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for substream `index` of `seed`. The same (seed, index)
/// pair always yields the same sequence, whatever thread consumes it.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(index)))};
  return std::mt19937_64(seq);
}

// The conversions below are spelled out instead of using <random>
// distributions, whose output differs between standard library vendors.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), Lemire's multiply-and-reject method.
inline std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  unsigned __int128 product = static_cast<unsigned __int128>(engine()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(engine()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace clickstat
