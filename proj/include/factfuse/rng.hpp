#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace factfuse {

// SplitMix64 step; used to whiten seeds before feeding mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic random stream. Every (master seed, tag) pair yields an
// independent, reproducible substream; identical inputs replay identical
// draws regardless of what other streams consumed in between.
class SplitRng {
 public:
  SplitRng(std::uint64_t master_seed, std::string_view tag)
      : gen_(splitmix64(splitmix64(master_seed) ^ fnv1a64(tag))) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint32_t below(std::uint32_t bound) {
    if (bound == 0) throw std::invalid_argument("below: bound must be positive");
    const std::uint64_t limit = (~0ull / bound) * bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::uint32_t>(x % bound);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace factfuse
