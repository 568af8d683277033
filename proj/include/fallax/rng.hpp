#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fallax {

// Deterministic PRNG stack used everywhere randomness is needed. The exact
// algorithms are part of the toolkit contract so that shuffles, folds and
// resamples are reproducible across builds and platforms:
//   seeding   : SplitMix64 (Steele et al.), one 64-bit state word
//   generator : xoshiro256** (Blackman & Vigna), state filled from SplitMix64
//   bounded   : next() % n
//   shuffle   : Fisher-Yates, i = n-1..1, j = bounded(i+1)

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// One sample from N(0, sigma^2), Box-Muller.
  double normal(double sigma) {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

/// Independent generator for stream `stream` under one master seed. Streams
/// are decorrelated by hashing, so workers may consume them in any order.
inline Xoshiro256StarStar derived_rng(std::uint64_t master, std::uint64_t stream) {
  return Xoshiro256StarStar(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

template <typename T>
void fisher_yates(std::vector<T>& items, Xoshiro256StarStar& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fallax
