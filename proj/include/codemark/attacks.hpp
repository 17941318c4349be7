#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemark/config.hpp"
#include "codemark/payload.hpp"
#include "codemark/vocab.hpp"

namespace codemark {

enum class AttackKind : std::uint8_t {
  // Type 1: mutate what is there.
  modify_identifiers,
  modify_io,
  modify_comments,
  modify_user_data,
  modify_assignments,
  // Type 2: insert new code.
  add_comments,
  add_assignments,
  add_redundant,
};

inline constexpr AttackKind kAllAttacks[] = {
    AttackKind::modify_identifiers, AttackKind::modify_io,       AttackKind::modify_comments,
    AttackKind::modify_user_data,   AttackKind::modify_assignments, AttackKind::add_comments,
    AttackKind::add_assignments,    AttackKind::add_redundant,
};

const char* to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& text);
bool is_insertion(AttackKind kind);

struct AttackOptions {
  enum class Mode : std::uint8_t { either, modify, remove };

  std::size_t intensity = 1;  // targets (or insertions) per attack
  Mode mode = Mode::either;   // for Type 1 kinds that can also delete
  bool strings_only = false;  // modify_user_data: leave numbers alone
};

struct AttackOutcome {
  std::string code;
  bool noop = false;  // no applicable site; code is unchanged
  std::size_t edits = 0;
  std::string note;
};

// Seeded textual mutation. Output stays within printable ASCII plus newlines,
// so it tokenizes under any vocabulary that has every single character.
// Insertions land only at the start of a non-blank line after the first one.
AttackOutcome apply_attack(std::string_view code, AttackKind kind, std::uint64_t seed,
                           const AttackOptions& options = {});

// Lexical spans of Python-like source, used to locate attack sites.
struct Span {
  enum class Kind : std::uint8_t { identifier, number, string, comment };
  Kind kind;
  std::size_t begin;
  std::size_t end;
  std::size_t body_begin;  // string or comment contents
  std::size_t body_end;
  bool triple = false;
};

std::vector<Span> lex_python(std::string_view code);

struct Sample {
  std::string code;
  Bits expected;
};

struct SurvivalRow {
  AttackKind kind;
  std::size_t survived = 0;
  std::size_t total = 0;
  std::size_t noop = 0;
};

struct SurvivalMatrix {
  std::vector<SurvivalRow> rows;
  std::size_t excluded = 0;  // samples that did not detect before any attack
  std::size_t survived() const;
  std::size_t total() const;
};

// Applies every kind `trials` times to every sample and re-runs detection; a
// trial survives when detection recovers the expected bits.
SurvivalMatrix robustness_eval(const std::vector<Sample>& samples, const std::vector<AttackKind>& kinds,
                               std::size_t trials, const Vocabulary& vocab, const EmbedConfig& config,
                               std::uint64_t seed, const AttackOptions& options = {});

}  // namespace codemark
