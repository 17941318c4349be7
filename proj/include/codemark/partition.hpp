#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "codemark/hash.hpp"

namespace codemark {

// Membership bitmap over token ids. `selected` is the hash-chosen set D; the
// complement is implicit.
class PartitionMask {
 public:
  PartitionMask() = default;
  PartitionMask(std::vector<std::uint8_t> member, double gamma);

  std::size_t total_size() const noexcept { return member_.size(); }
  std::size_t selected_count() const noexcept { return count_; }
  double gamma() const noexcept { return gamma_; }

  bool contains(TokenId id) const { return member_.at(id) != 0; }
  void add(TokenId id);

  std::vector<TokenId> selected_ids() const;
  PartitionMask complement() const;

  friend bool operator==(const PartitionMask&, const PartitionMask&) = default;

 private:
  std::vector<std::uint8_t> member_;
  std::size_t count_ = 0;
  double gamma_ = 0.0;
};

// ceil(gamma * n), guarded against rounding when gamma * n is an integer.
std::size_t selected_size(std::size_t vocab_size, double gamma);

// Partial Fisher-Yates over 0..vocab_size-1 seeded with `hash`; keeps the
// first selected_size(vocab_size, gamma) picks. Throws ConfigError unless
// 0 < gamma < 1.
PartitionMask partition(std::size_t vocab_size, std::uint64_t hash, double gamma);

// Exactly `count` distinct picks from `candidates`, in pick order.
std::vector<TokenId> choose_subset(const std::vector<TokenId>& candidates, std::size_t count,
                                   std::uint64_t seed);

}  // namespace codemark
