#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace npcmaj {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based generator: the i-th output of a stream is a pure function of
// (key, i), so streams derived from (seed, index) are independent of the order
// in which they are consumed. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  /// Stream number `index` of `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, no cached pair).
  double normal() noexcept;
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) noexcept;

  Rng split(std::uint64_t index) const noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace npcmaj
