#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "codemark/partition.hpp"

namespace codemark {

struct Quartiles {
  double q1 = 0.0;
  double q3 = 0.0;
};

struct OutlierReport {
  std::vector<TokenId> upper_outliers;  // ascending token id
  double f_upper = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double scale = 1.5;
};

// Checks non-negativity and unit sum (within 1e-6).
bool is_distribution(std::span<const double> probs);

// Linear-interpolation quantiles at 0.25 and 0.75: position p * (n - 1) of
// the ascending sort, interpolated between its floor and ceil neighbours.
Quartiles quartiles(std::span<const double> probs);

// Upper whisker F = (S + 1) * Q3 - S * Q1; outliers are entries strictly above.
OutlierReport detect_upper_outliers(std::span<const double> probs, double scale);

// Admits outliers into the favoured side: one outlier is added outright, and
// for two or more, ceil(n / 2) of them (picked from the ascending-id list by a
// generator seeded from `hash`) are added.
PartitionMask augment_partition(const PartitionMask& mask, const OutlierReport& report, std::uint64_t hash);

// max - min of the distribution, rounded up so that p + gap >= max holds in
// floating point for every p >= min.
double probability_gap(std::span<const double> probs);

// Adds the gap to every selected entry; no renormalisation.
std::vector<double> apply_gap_bias(std::span<const double> probs, const PartitionMask& mask);

// Greedy pick over `scores`. Ties go to a selected entry first, then to the
// lowest id. Entries rejected by `allowed` are never picked; returns nullopt if
// none is allowed.
std::optional<TokenId> greedy_argmax(std::span<const double> scores, const PartitionMask* favoured = nullptr,
                                     const std::function<bool(TokenId)>& allowed = {});

// 1 iff the sampled token is an upper outlier outside the original favoured set.
std::uint8_t tolerance_bit(TokenId sampled, const OutlierReport& report, const PartitionMask& original);

}  // namespace codemark
