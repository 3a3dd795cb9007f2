#pragma once

#include <cstdint>

namespace causet {

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed for the `stream`-th independent sub-stream of `base`
/// (repetitions, splits, placebo draws all derive their seeds this way).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return mix64(base + kGoldenGamma * (stream + 1));
}

/// Counter-based generator: the k-th output (k = 1, 2, ...) is
/// mix64(seed + k * 0x9E3779B97F4A7C15). This is exactly splitmix64, so any
/// language with 64-bit wrapping arithmetic reproduces the stream.
///
/// Derived variates:
///   uniform  = (next_u64() >> 11) * 2^-53            in [0, 1)
///   normal   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)     (Box-Muller, cosine branch)
///   bernoulli(p) = uniform() < p
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(seed_ + kGoldenGamma * counter_);
  }

  double uniform() noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace causet
