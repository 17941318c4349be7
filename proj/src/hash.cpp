#include "codemark/hash.hpp"

#include <algorithm>

namespace codemark {

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection of the biased low region.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void HashChain::advance(TokenId token, std::size_t bit_position) {
  snapshots_.push_back({bit_position, current_});
  if (chained_) current_ = mix(current_, token);
}

std::size_t HashChain::rollback(std::size_t count) {
  const std::size_t n = std::min(count, snapshots_.size());
  for (std::size_t i = 0; i < n; ++i) {
    current_ = snapshots_.back().hash;
    snapshots_.pop_back();
  }
  return n;
}

}  // namespace codemark
