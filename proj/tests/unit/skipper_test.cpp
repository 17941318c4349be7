#include <gtest/gtest.h>

#include "codemark/error.hpp"
#include "codemark/skipper.hpp"
#include "skip_fixtures.hpp"

using namespace codemark;

namespace {

void embed_bits(const Skipper& s, SkipperState& st, HashChain& chain, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) s.assign_bit(st, chain, static_cast<TokenId>(i));
}

}  // namespace

TEST(SkipFixtures, EveryRowMatches) {
  for (const auto& f : fixtures::skip_fixtures()) {
    const auto run = fixtures::run_fixture(f);
    for (std::size_t i = 0; i < f.steps.size(); ++i) {
      EXPECT_EQ(run.got[i], f.steps[i].second) << f.name << " token " << i << " '" << f.steps[i].first << "'";
    }
    EXPECT_EQ(run.bits, f.final_bits) << f.name;
    EXPECT_EQ(run.locked_bits, 0u) << f.name;
  }
}

TEST(Skipper, KeywordLocksToNewline) {
  Skipper s(24);
  SkipperState st;
  EXPECT_EQ(s.inspect("def", st), StepDecision::skip(Pattern::keyword));
  ASSERT_TRUE(st.lock);
  EXPECT_EQ(st.lock->terminator, "\n");
}

TEST(Skipper, AssignmentRescindsBitsSinceLineStart) {
  Skipper s(24);
  SkipperState st;
  HashChain chain(1);
  embed_bits(s, st, chain, 5);
  st.line_anchor = 2;  // newline-bearing token seen after bit 2
  const auto before = chain.snapshots()[2].hash;
  const auto d = s.inspect("x = ", st);
  EXPECT_EQ(d, StepDecision::rescind(3, Pattern::assignment));
  ASSERT_TRUE(st.lock);
  EXPECT_EQ(st.lock->pattern, Pattern::assignment);
  EXPECT_EQ(s.rollback_bits(st, chain, d.rollback), 3u);
  EXPECT_EQ(st.bits_total, 2u);
  EXPECT_EQ(chain.current(), before);
}

TEST(Skipper, CloserWithNewlineClearsBracketLock) {
  Skipper s(24);
  SkipperState st;
  HashChain chain(1);
  embed_bits(s, st, chain, 4);
  EXPECT_EQ(s.inspect("(", st), StepDecision::skip(Pattern::bracket));
  EXPECT_EQ(s.inspect("):\n", st), StepDecision::skip(Pattern::bracket));
  EXPECT_FALSE(st.lock);
  EXPECT_EQ(st.line_anchor, 4u);
  EXPECT_EQ(s.inspect("y", st), StepDecision::embed());
}

TEST(Skipper, RollbackZeroIsIdentity) {
  Skipper s(24);
  SkipperState st;
  HashChain chain(9);
  embed_bits(s, st, chain, 3);
  const auto copy = st;
  const auto h = chain.current();
  EXPECT_EQ(s.rollback_bits(st, chain, 0), 0u);
  EXPECT_EQ(st, copy);
  EXPECT_EQ(chain.current(), h);
}

TEST(Skipper, RollbackNeverCrossesRoundStart) {
  Skipper s(4);
  SkipperState st;
  HashChain chain(9);
  embed_bits(s, st, chain, 5);
  EXPECT_EQ(st.rounds, 1u);
  EXPECT_EQ(st.bit_cursor, 1u);
  EXPECT_EQ(s.rollback_bits(st, chain, 3), 1u);
  EXPECT_EQ(st.bit_cursor, 0u);
  EXPECT_EQ(st.rounds, 1u);
  EXPECT_EQ(st.bits_total, 4u);
}

TEST(Skipper, CustomSetsAreHonoured) {
  PatternSets sets;
  sets.keywords = {"fn"};
  sets.symbols = {":="};
  Skipper s(8, sets);
  SkipperState st;
  EXPECT_EQ(s.inspect("def", st), StepDecision::embed());
  EXPECT_EQ(s.inspect("fn", st), StepDecision::skip(Pattern::keyword));
}

TEST(Skipper, RejectsOddLength) { EXPECT_THROW(Skipper(7), ConfigError); }
