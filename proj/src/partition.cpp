#include "codemark/partition.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>

#include "codemark/error.hpp"

namespace codemark {

PartitionMask::PartitionMask(std::vector<std::uint8_t> member, double gamma)
    : member_(std::move(member)), gamma_(gamma) {
  for (auto m : member_) count_ += m != 0;
}

void PartitionMask::add(TokenId id) {
  auto& slot = member_.at(id);
  if (!slot) {
    slot = 1;
    ++count_;
  }
}

std::vector<TokenId> PartitionMask::selected_ids() const {
  std::vector<TokenId> out;
  out.reserve(count_);
  for (TokenId i = 0; i < member_.size(); ++i) {
    if (member_[i]) out.push_back(i);
  }
  return out;
}

PartitionMask PartitionMask::complement() const {
  std::vector<std::uint8_t> flipped(member_.size());
  for (std::size_t i = 0; i < member_.size(); ++i) flipped[i] = member_[i] ? 0 : 1;
  return PartitionMask(std::move(flipped), 1.0 - gamma_);
}

std::size_t selected_size(std::size_t vocab_size, double gamma) {
  const long double exact = static_cast<long double>(gamma) * static_cast<long double>(vocab_size);
  const long double nearest = std::round(exact);
  if (std::fabs(exact - nearest) <= 1e-9L * std::max<long double>(1.0L, exact)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(exact));
}

PartitionMask partition(std::size_t vocab_size, std::uint64_t hash, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("gamma must lie strictly between 0 and 1, got " + std::to_string(gamma));
  }
  const std::size_t k = selected_size(vocab_size, gamma);
  std::vector<TokenId> order(vocab_size);
  std::iota(order.begin(), order.end(), TokenId{0});
  SplitMix64 rng(hash);
  std::vector<std::uint8_t> member(vocab_size, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(vocab_size - i);
    std::swap(order[i], order[j]);
    member[order[i]] = 1;
  }
  return PartitionMask(std::move(member), gamma);
}

std::vector<TokenId> choose_subset(const std::vector<TokenId>& candidates, std::size_t count,
                                   std::uint64_t seed) {
  std::vector<TokenId> pool = candidates;
  count = std::min(count, pool.size());
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace codemark
