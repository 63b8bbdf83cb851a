#pragma once

#include <array>
#include <cstdint>

namespace selectlab {

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudorandom bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// splitmix64 finalizer, used to derive independent seeds from tags.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a sub-experiment identified by `tag` (e.g. the list size n).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Sequential view of one Philox stream. The pair (seed, stream) fixes the
/// output on every platform; the block counter runs from zero.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform on (0,1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }

  /// Uniform integer in [0, bound), bound > 0 (Lemire's unbiased method).
  std::uint64_t below(std::uint64_t bound) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 20130801;

}  // namespace selectlab
