#include <gtest/gtest.h>

#include "codemark/attacks.hpp"
#include "codemark/detector.hpp"
#include "codemark/embedder.hpp"
#include "codemark/provider.hpp"
#include "test_support.hpp"

using namespace codemark;

namespace {

const Vocabulary& V() { return support::python_vocab(); }

const char* kCode =
    "def area(r):\n"
    "    \"\"\"Circle area.\"\"\"\n"
    "    pi = 3.14  # close enough\n"
    "    label = 'circle'\n"
    "    print(label, pi * r * r)\n"
    "    return pi * r * r\n";

bool char_subsequence(const std::string& small, const std::string& big) {
  std::size_t i = 0;
  for (char c : big) {
    if (i < small.size() && small[i] == c) ++i;
  }
  return i == small.size();
}

std::vector<Sample> embedded_samples(std::size_t want) {
  std::vector<Sample> out;
  for (std::uint64_t s = 0; out.size() < want && s < 200; ++s) {
    ProviderSpec spec;
    spec.seed = s + 21;
    spec.template_code = support::templates()[s % support::templates().size()];
    auto p = make_mock_provider(V(), spec);
    const auto payload = WatermarkPayload::for_user((s * 911) % 4096);
    auto r = embed({}, payload, *p, V(), EmbedConfig{});
    if (r.status == EmbedStatus::complete) out.push_back({r.code, payload.detection_bits()});
  }
  return out;
}

}  // namespace

TEST(Attacks, NamesRoundTrip) {
  for (AttackKind k : kAllAttacks) EXPECT_EQ(parse_attack_kind(to_string(k)), k);
  EXPECT_THROW(parse_attack_kind("rename-everything"), std::exception);
  EXPECT_TRUE(is_insertion(AttackKind::add_redundant));
  EXPECT_FALSE(is_insertion(AttackKind::modify_io));
}

TEST(Attacks, DeterministicPerSeed) {
  for (AttackKind k : kAllAttacks) {
    EXPECT_EQ(apply_attack(kCode, k, 17).code, apply_attack(kCode, k, 17).code) << to_string(k);
  }
}

TEST(Attacks, EveryKindFindsASite) {
  for (AttackKind k : kAllAttacks) {
    const auto out = apply_attack(kCode, k, 5);
    EXPECT_FALSE(out.noop) << to_string(k);
    EXPECT_NE(out.code, kCode) << to_string(k);
  }
}

TEST(Attacks, NoopWhenNothingApplies) {
  const auto out = apply_attack("x\n", AttackKind::modify_comments, 1);
  EXPECT_TRUE(out.noop);
  EXPECT_EQ(out.code, "x\n");
  EXPECT_TRUE(apply_attack("x\n", AttackKind::add_comments, 1).noop);  // nothing after the first line
}

TEST(Attacks, InsertionsKeepTheOriginal) {
  for (const auto& code : support::templates()) {
    for (AttackKind k : {AttackKind::add_comments, AttackKind::add_assignments, AttackKind::add_redundant}) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        AttackOptions o;
        o.intensity = 1 + s % 3;
        const auto out = apply_attack(code, k, s, o);
        EXPECT_TRUE(char_subsequence(code, out.code)) << to_string(k);
        // The first line is never touched.
        EXPECT_EQ(out.code.substr(0, code.find('\n') + 1), code.substr(0, code.find('\n') + 1));
      }
    }
  }
}

TEST(Attacks, OutputStaysTokenizable) {
  for (const auto& code : support::templates()) {
    const std::string filled = fill_template_holes(code, V(), 3);
    for (AttackKind k : kAllAttacks) {
      for (std::uint64_t s = 0; s < 6; ++s) {
        const auto out = apply_attack(filled, k, s);
        EXPECT_NO_THROW(V().tokenize(out.code)) << to_string(k);
      }
    }
  }
}

TEST(Attacks, IdentifierRenameIsConsistent) {
  const auto out = apply_attack("x = 1\ny = x + x\n", AttackKind::modify_identifiers, 4);
  ASSERT_FALSE(out.noop);
  // Whichever name was picked, every occurrence moved together.
  const bool x_gone = out.code.find('x') == std::string::npos;
  const bool y_gone = out.code.find("y =") == std::string::npos;
  EXPECT_TRUE(x_gone || y_gone) << out.code;
}

TEST(Attacks, ModesSelectEdit) {
  AttackOptions rm;
  rm.mode = AttackOptions::Mode::remove;
  const auto gone = apply_attack(kCode, AttackKind::modify_io, 2, rm);
  EXPECT_EQ(gone.code.find("print"), std::string::npos);
  AttackOptions mod;
  mod.mode = AttackOptions::Mode::modify;
  const auto changed = apply_attack(kCode, AttackKind::modify_io, 2, mod);
  EXPECT_NE(changed.code.find("print(\""), std::string::npos);
}

TEST(Attacks, StringsOnlyLeavesNumbers) {
  AttackOptions o;
  o.strings_only = true;
  o.intensity = 10;
  const auto out = apply_attack(kCode, AttackKind::modify_user_data, 8, o);
  EXPECT_NE(out.code.find("3.14"), std::string::npos);
  EXPECT_EQ(out.code.find("'circle'"), std::string::npos);
}

TEST(Lexer, FindsSpans) {
  const auto spans = lex_python(kCode);
  std::size_t comments = 0, strings = 0, numbers = 0, triple = 0;
  for (const auto& s : spans) {
    comments += s.kind == Span::Kind::comment;
    strings += s.kind == Span::Kind::string;
    numbers += s.kind == Span::Kind::number;
    triple += s.triple;
  }
  EXPECT_EQ(comments, 1u);
  EXPECT_EQ(strings, 2u);
  EXPECT_EQ(triple, 1u);
  EXPECT_EQ(numbers, 1u);
}

TEST(Attacks, CommentRewritesLeaveDetectionAlone) {
  AttackOptions o;
  o.mode = AttackOptions::Mode::modify;
  for (const auto& sample : embedded_samples(6)) {
    const auto before = extract_bits(V().tokenize(sample.code), V(), EmbedConfig{});
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto out = apply_attack(sample.code, AttackKind::modify_comments, s, o);
      if (out.noop) continue;
      const auto after = extract_bits(V().tokenize(out.code), V(), EmbedConfig{});
      EXPECT_EQ(after.rounds, before.rounds);
      EXPECT_EQ(after.trailing, before.trailing);
      auto d = detect(out.code, V(), EmbedConfig{});
      EXPECT_TRUE(d.detected && d.user_bits == sample.expected);
    }
  }
}

TEST(Robustness, MatrixShape) {
  auto samples = embedded_samples(3);
  samples.push_back({"x = 1\n", Bits(12, 0)});  // never detected, so excluded
  const std::vector<AttackKind> kinds(std::begin(kAllAttacks), std::end(kAllAttacks));
  const auto m = robustness_eval(samples, kinds, 2, V(), EmbedConfig{}, 9);
  EXPECT_EQ(m.excluded, 1u);
  ASSERT_EQ(m.rows.size(), 8u);
  for (const auto& row : m.rows) {
    EXPECT_EQ(row.total, 6u);
    EXPECT_LE(row.survived, row.total);
  }
  EXPECT_EQ(m.total(), 48u);
}
