#include <gtest/gtest.h>

#include <random>

#include "codemark/outlier.hpp"
#include "codemark/partition.hpp"
#include "test_support.hpp"

using namespace codemark;

namespace {

PartitionMask mask_of(std::size_t n, std::initializer_list<TokenId> ids) {
  std::vector<std::uint8_t> m(n, 0);
  for (auto id : ids) m[id] = 1;
  return PartitionMask(std::move(m), 0.5);
}

}  // namespace

TEST(Quartiles, ConstantVector) {
  const std::vector<double> p(4, 0.25);
  auto q = quartiles(p);
  EXPECT_EQ(q.q1, 0.25);
  EXPECT_EQ(q.q3, 0.25);
  EXPECT_TRUE(detect_upper_outliers(p, 1.5).upper_outliers.empty());
}

TEST(Quartiles, FiveEntryExample) {
  const std::vector<double> p = {0.3, 0.05, 0.5, 0.1, 0.05};  // unsorted on purpose
  auto r = detect_upper_outliers(p, 1.5);
  EXPECT_DOUBLE_EQ(r.q1, support::oracle_quantile(p, 0.25));
  EXPECT_DOUBLE_EQ(r.q3, support::oracle_quantile(p, 0.75));
  EXPECT_DOUBLE_EQ(r.q1, 0.05);
  EXPECT_DOUBLE_EQ(r.q3, 0.3);
  EXPECT_NEAR(r.f_upper, 0.675, 1e-15);
  EXPECT_TRUE(r.upper_outliers.empty());
}

TEST(Quartiles, SingleSpike) {
  std::vector<double> p(10, 0.01);
  p[6] = 0.91;
  auto r = detect_upper_outliers(p, 1.5);
  EXPECT_DOUBLE_EQ(r.q1, 0.01);
  EXPECT_DOUBLE_EQ(r.q3, 0.01);
  EXPECT_DOUBLE_EQ(r.f_upper, 0.01);
  EXPECT_EQ(r.upper_outliers, std::vector<TokenId>{6});
}

TEST(Quartiles, AgreeWithRankOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 60;
    std::vector<double> p(n);
    for (auto& x : p) x = static_cast<double>(gen() % 1000) / 997.0;  // ties on purpose
    const auto q = quartiles(p);
    EXPECT_NEAR(q.q1, support::oracle_quantile(p, 0.25), 1e-12 * std::max(1.0, q.q1));
    EXPECT_NEAR(q.q3, support::oracle_quantile(p, 0.75), 1e-12 * std::max(1.0, q.q3));
  }
}

TEST(Augment, EmptyIsIdentity) {
  auto m = partition(16, 5, 0.5);
  EXPECT_EQ(augment_partition(m, OutlierReport{}, 5), m);
}

TEST(Augment, LoneOutlierJoins) {
  auto m = mask_of(12, {0, 1});
  OutlierReport r;
  r.upper_outliers = {7};
  auto a = augment_partition(m, r, 1);
  EXPECT_TRUE(a.contains(7));
  EXPECT_EQ(a.selected_count(), 3u);
}

TEST(Augment, HalfOfSeveralRoundedUp) {
  auto m = mask_of(12, {0});
  OutlierReport r;
  r.upper_outliers = {3, 9, 11};
  auto a = augment_partition(m, r, 7775);
  EXPECT_EQ(a.selected_count(), 3u);
  // choose_subset reference for seed 7775 ^ salt picks {3, 11}.
  EXPECT_TRUE(a.contains(3));
  EXPECT_FALSE(a.contains(9));
  EXPECT_TRUE(a.contains(11));
}

TEST(GapBias, Example) {
  const std::vector<double> p = {0.7, 0.2, 0.1};
  auto b = apply_gap_bias(p, mask_of(3, {2}));
  EXPECT_DOUBLE_EQ(b[0], 0.7);
  EXPECT_DOUBLE_EQ(b[1], 0.2);
  EXPECT_NEAR(b[2], 0.7, 1e-15);
  EXPECT_GE(b[2], b[0]);
  EXPECT_EQ(greedy_argmax(b, nullptr), TokenId{0});  // plain argmax keeps the first maximum
  auto fav = mask_of(3, {2});
  EXPECT_EQ(greedy_argmax(b, &fav), TokenId{2});     // the favoured side wins the tie
}

TEST(GapBias, ConstantUnchanged) {
  const std::vector<double> p(4, 0.25);
  EXPECT_EQ(apply_gap_bias(p, mask_of(4, {1, 3})), p);
}

TEST(GapBias, AllSelectedKeepsArgmax) {
  const std::vector<double> p = {0.1, 0.6, 0.3};
  auto b = apply_gap_bias(p, mask_of(3, {0, 1, 2}));
  EXPECT_EQ(greedy_argmax(b), TokenId{1});
}

TEST(GapBias, GapCoversSpreadInFloatingPoint) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> p = {u(gen), u(gen), u(gen)};
    const double gap = probability_gap(p);
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    EXPECT_GE(*lo + gap, *hi);
  }
}

TEST(Argmax, TieBreakLowestIdThenFavoured) {
  const std::vector<double> s = {0.2, 0.5, 0.5, 0.5};
  EXPECT_EQ(greedy_argmax(s), TokenId{1});
  auto fav = mask_of(4, {3});
  EXPECT_EQ(greedy_argmax(s, &fav), TokenId{3});
  auto fav2 = mask_of(4, {2, 3});
  EXPECT_EQ(greedy_argmax(s, &fav2), TokenId{2});
}

TEST(Argmax, AllowedFilterFallsThrough) {
  const std::vector<double> s = {0.1, 0.5, 0.4};
  EXPECT_EQ(greedy_argmax(s, nullptr, [](TokenId t) { return t != 1; }), TokenId{2});
  EXPECT_EQ(greedy_argmax(s, nullptr, [](TokenId) { return false; }), std::nullopt);
}

TEST(Tolerance, Cases) {
  auto original = mask_of(4, {0, 1});
  OutlierReport none;
  EXPECT_EQ(tolerance_bit(3, none, original), 0);
  OutlierReport r;
  r.upper_outliers = {1, 3};
  EXPECT_EQ(tolerance_bit(1, r, original), 0);  // already on the favoured side
  EXPECT_EQ(tolerance_bit(3, r, original), 1);  // admitted from the other side
  EXPECT_EQ(tolerance_bit(2, r, original), 0);  // not an outlier
}

TEST(Distribution, Validity) {
  EXPECT_TRUE(is_distribution(std::vector<double>{0.5, 0.5}));
  EXPECT_FALSE(is_distribution(std::vector<double>{0.5, 0.6}));
  EXPECT_FALSE(is_distribution(std::vector<double>{1.5, -0.5}));
}
