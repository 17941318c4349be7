#include <gtest/gtest.h>

#include <sstream>

#include "codemark/error.hpp"
#include "codemark/vocab.hpp"
#include "test_support.hpp"

using namespace codemark;

namespace {

Vocabulary from(const std::string& text) {
  std::istringstream in(text);
  return Vocabulary::load(in);
}

}  // namespace

TEST(VocabLoad, MinimalTable) {
  auto v = from("0\ta\n1\tb\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.text(0), "a");
  EXPECT_EQ(v.text(1), "b");
}

TEST(VocabLoad, DuplicateIdRejected) {
  try {
    from("0\ta\n0\tb\n");
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate id 0"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(VocabLoad, EscapesDecodeToRawBytes) {
  auto v = from("0\t\\n\n1\t\\t\n2\t\\\\\n3\t  \n");
  EXPECT_EQ(v.text(0), "\n");
  EXPECT_EQ(v.text(1), "\t");
  EXPECT_EQ(v.text(2), "\\");
  EXPECT_EQ(v.text(3), "  ");
}

TEST(VocabLoad, Rejections) {
  EXPECT_THROW(from("0\ta\n"), LoadError);                 // fewer than two entries
  EXPECT_THROW(from("0\ta\n2\tb\n"), LoadError);           // gap
  EXPECT_THROW(from("0\ta\n1\ta\n"), LoadError);           // duplicate text
  EXPECT_THROW(from("0\ta\n1\t\\q\n"), LoadError);         // unknown escape
  EXPECT_THROW(from("0\ta\nx\tb\n"), LoadError);           // bad id
  EXPECT_THROW(from("0\ta\n1b\n"), LoadError);             // no tab
}

TEST(VocabLoad, SaveRoundTrips) {
  const auto& v = support::python_vocab();
  std::stringstream ss;
  v.save(ss);
  auto again = Vocabulary::load(ss);
  EXPECT_EQ(again.texts(), v.texts());
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(from("0\ta\n1\tb\n").tokenize("").empty()); }

TEST(Tokenize, LeftmostLongestBeatsShorterSplit) {
  auto v = Vocabulary::from_texts({"a", "b", "ab"});
  const auto ids = v.tokenize("ab");
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_EQ(v.text(ids[0]), "ab");
  EXPECT_EQ(support::oracle_leftmost_longest(v.texts(), "ab"), std::vector<std::string>{"ab"});
}

TEST(Tokenize, ErrorCarriesOffset) {
  auto v = from("0\ta\n1\tb\n");
  try {
    v.tokenize("ac");
    FAIL();
  } catch (const TokenizeError& e) {
    EXPECT_EQ(e.offset(), 1u);
  }
}

TEST(Tokenize, AgreesWithSegmentationEnumeration) {
  const std::vector<std::string> texts = {"a", "b", "c", "ab", "bc", "abc", "ca", "cab", "bca"};
  auto v = Vocabulary::from_texts(texts);
  // Every string over {a,b,c} up to length 7.
  std::vector<std::string> frontier = {""};
  std::size_t checked = 0;
  for (int len = 1; len <= 7; ++len) {
    std::vector<std::string> next;
    for (const auto& s : frontier) {
      for (char c : std::string("abc")) next.push_back(s + c);
    }
    for (const auto& s : next) {
      std::vector<std::string> got;
      for (auto id : v.tokenize(s)) got.emplace_back(v.text(id));
      ASSERT_EQ(got, support::oracle_leftmost_longest(texts, s)) << s;
      ++checked;
    }
    frontier = std::move(next);
  }
  EXPECT_EQ(checked, 3u + 9 + 27 + 81 + 243 + 729 + 2187);
}

TEST(Tokenize, DetokenizeInverts) {
  const auto& v = support::python_vocab();
  for (const auto& code : support::templates()) {
    // Templates carry {{hole}} markers, which are plain ASCII too.
    EXPECT_EQ(v.detokenize(v.tokenize(code)), code);
  }
}

TEST(Canonical, MatchesRetokenizationOracle) {
  auto v = Vocabulary::from_texts({"a", "b", "c", "ab", "bc", "abc", "ca", " ", "  ", " a"});
  // Walk every token sequence of length <= 4 built only from canonical steps,
  // and check each candidate against full re-tokenization.
  std::vector<std::vector<TokenId>> frontier = {{}};
  std::size_t checked = 0;
  for (int depth = 0; depth < 4; ++depth) {
    std::vector<std::vector<TokenId>> next;
    for (const auto& seq : frontier) {
      const std::string text = v.detokenize(seq);
      for (TokenId t = 0; t < v.size(); ++t) {
        auto ext = seq;
        ext.push_back(t);
        const bool oracle = v.tokenize(v.detokenize(ext)) == ext;
        ASSERT_EQ(v.extends_canonically(seq, text, t), oracle) << text << " + " << v.text(t);
        ++checked;
        if (oracle) next.push_back(ext);
      }
    }
    frontier = std::move(next);
  }
  EXPECT_GT(checked, 1000u);
}
