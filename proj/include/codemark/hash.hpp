#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace codemark {

using TokenId = std::uint32_t;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Three-round shift-xor-multiply finalizer (splitmix64 output function).
constexpr std::uint64_t avalanche(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Streamed splitmix64. Every pseudo-random choice shared by embedding and
// detection goes through this generator, so its output sequence is part of the
// watermark format.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return avalanche(state_);
  }

  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) from the top 53 bits.
  double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct HashSnapshot {
  std::size_t bit_position;
  std::uint64_t hash;
};

// Running hash H plus one snapshot per bit-carrying token so that rescinded
// bits can restore the hash that was in force before they were assigned.
class HashChain {
 public:
  explicit HashChain(std::uint64_t seed, bool chained = true) : current_(seed), chained_(chained) {}

  std::uint64_t current() const noexcept { return current_; }
  bool chained() const noexcept { return chained_; }
  std::size_t depth() const noexcept { return snapshots_.size(); }
  const std::vector<HashSnapshot>& snapshots() const noexcept { return snapshots_; }

  // Records the current hash under `bit_position` and mixes `token` in. In
  // fixed mode the snapshot is still recorded but H stays constant.
  void advance(TokenId token, std::size_t bit_position);

  // Pops up to `count` snapshots; returns how many were popped.
  std::size_t rollback(std::size_t count);

  static std::uint64_t mix(std::uint64_t hash, TokenId token) noexcept {
    return avalanche(hash ^ ((static_cast<std::uint64_t>(token) + 1) * kGoldenGamma));
  }

 private:
  std::uint64_t current_;
  bool chained_;
  std::vector<HashSnapshot> snapshots_;
};

}  // namespace codemark
