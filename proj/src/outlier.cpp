#include "codemark/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace codemark {

namespace {

constexpr std::uint64_t kOutlierSalt = 0xD1B54A32D192ED03ULL;

double quantile_sorted(const std::vector<double>& sorted, double level) {
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

bool is_distribution(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::fabs(sum - 1.0) <= 1e-6;
}

Quartiles quartiles(std::span<const double> probs) {
  std::vector<double> sorted(probs.begin(), probs.end());
  if (sorted.empty()) return {};
  std::sort(sorted.begin(), sorted.end());
  return {quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
}

OutlierReport detect_upper_outliers(std::span<const double> probs, double scale) {
  OutlierReport report;
  const auto [q1, q3] = quartiles(probs);
  report.q1 = q1;
  report.q3 = q3;
  report.scale = scale;
  report.f_upper = (scale + 1.0) * q3 - scale * q1;
  for (TokenId id = 0; id < probs.size(); ++id) {
    if (probs[id] > report.f_upper) report.upper_outliers.push_back(id);
  }
  return report;
}

PartitionMask augment_partition(const PartitionMask& mask, const OutlierReport& report, std::uint64_t hash) {
  PartitionMask out = mask;
  const auto& outliers = report.upper_outliers;
  if (outliers.size() == 1) {
    out.add(outliers.front());
  } else if (outliers.size() >= 2) {
    const std::size_t half = (outliers.size() + 1) / 2;
    for (TokenId id : choose_subset(outliers, half, hash ^ kOutlierSalt)) out.add(id);
  }
  return out;
}

double probability_gap(std::span<const double> probs) {
  if (probs.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(probs.begin(), probs.end());
  const double max = *hi;
  const double min = *lo;
  double gap = max - min;
  // Exact residual of the subtraction (TwoSum); bump one ulp if it rounded down.
  const double neg_min = -min;
  const double bb = gap - max;
  const double err = (max - (gap - bb)) + (neg_min - bb);
  if (err > 0.0) gap = std::nextafter(gap, INFINITY);
  return gap;
}

std::vector<double> apply_gap_bias(std::span<const double> probs, const PartitionMask& mask) {
  const double gap = probability_gap(probs);
  std::vector<double> biased(probs.begin(), probs.end());
  for (TokenId id = 0; id < biased.size(); ++id) {
    if (mask.contains(id)) biased[id] += gap;
  }
  return biased;
}

std::optional<TokenId> greedy_argmax(std::span<const double> scores, const PartitionMask* favoured,
                                     const std::function<bool(TokenId)>& allowed) {
  std::unordered_set<TokenId> rejected;
  while (rejected.size() < scores.size()) {
    std::optional<TokenId> best;
    bool best_fav = false;
    for (TokenId id = 0; id < scores.size(); ++id) {
      if (!rejected.empty() && rejected.contains(id)) continue;
      const bool fav = favoured != nullptr && favoured->contains(id);
      if (!best || scores[id] > scores[*best] || (scores[id] == scores[*best] && fav && !best_fav)) {
        best = id;
        best_fav = fav;
      }
    }
    if (!best) return std::nullopt;
    if (!allowed || allowed(*best)) return best;
    rejected.insert(*best);
  }
  return std::nullopt;
}

std::uint8_t tolerance_bit(TokenId sampled, const OutlierReport& report, const PartitionMask& original) {
  const bool outlier = std::binary_search(report.upper_outliers.begin(), report.upper_outliers.end(), sampled);
  return outlier && !original.contains(sampled) ? 1 : 0;
}

}  // namespace codemark
