#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lmk {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Every random stream in the project is seeded through this function:
//   h = splitmix(base); h = splitmix(h ^ fnv1a(tag)); h = splitmix(h ^ i) for each index.
// One base seed therefore reproduces a whole experiment, and streams with
// different tags or indices are decorrelated.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::initializer_list<std::uint64_t> indices = {}) noexcept {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ fnv1a(tag));
  for (std::uint64_t i : indices) h = splitmix64(h ^ i);
  return h;
}

inline Rng make_rng(std::uint64_t base, std::string_view tag,
                    std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(base, tag, indices));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound), unbiased (rejection on the top zone).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace lmk
