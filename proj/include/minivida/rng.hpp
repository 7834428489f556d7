#pragma once

// Deterministic PRNG used everywhere in place of <random> distributions,
// whose output is not portable across standard libraries.  Engine is
// xoshiro256++ seeded through splitmix64; named streams let the world seed
// fan out into independent substreams (mutations/placement vs. environment
// draws) without one consumer perturbing another.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace vida {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) { reseed(seed); }

  // Substream: deterministic function of (seed, name) only.
  Rng(std::uint64_t seed, std::string_view stream) { reseed(seed ^ fnv1a64(stream)); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  // Uniform in [0, bound). Lemire rejection keeps it unbiased.
  std::uint32_t below(std::uint32_t bound) {
    std::uint64_t m = std::uint64_t(next_u32()) * bound;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < bound) {
      const std::uint32_t threshold = -bound % bound;
      while (lo < threshold) {
        m = std::uint64_t(next_u32()) * bound;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  // Distance to the next success in a Bernoulli(p) site scan (geometric
  // skip sampling); returns a huge gap when p <= 0.
  std::uint64_t geometric_gap(double p) {
    if (p <= 0.0) return UINT64_MAX;
    if (p >= 1.0) return 0;
    double u = unit();
    // log1p(-u) is never -inf since u < 1.
    return static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace vida
