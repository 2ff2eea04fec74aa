#pragma once

// Seedable, splittable random streams.
//
// Engine: xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64.
// Stream derivation: a seed for sub-stream (t1, t2, ...) of a master seed is
// the SplitMix64 finalizer folded over the tags. Nothing here depends on
// <random> distributions, so draws are identical on every platform.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace levsample {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Stream tags keep seeds for different purposes from colliding.
enum class Stream : std::uint64_t {
  Design = 1,
  Response = 2,
  Subsample = 3,
  Replicate = 4,
  Perturbation = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(master + kGoldenGamma);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + kGoldenGamma));
  return h;
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) {
      sm += kGoldenGamma;
      word = mix64(sm);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
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

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

/// Uniform on the open interval (0, 1), 53-bit resolution.
inline double uniform_open(Xoshiro256& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variates by the Box-Muller transform; the second value of
/// each pair is cached.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) noexcept : rng_(seed) {}

  double operator()() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open(rng_)));
    const double angle = 2.0 * std::numbers::pi * uniform_open(rng_);
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Xoshiro256& engine() noexcept { return rng_; }

 private:
  Xoshiro256 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levsample
