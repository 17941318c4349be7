#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codemark/hash.hpp"

namespace codemark {

// Trigger lexemes for the skip patterns. Defaults target Python.
struct PatternSets {
  std::vector<std::string> keywords;                             // pattern 1
  std::vector<std::pair<std::string, std::string>> brackets;     // pattern 2, opener/closer
  std::vector<std::string> symbols;                              // pattern 3
  std::vector<std::string> delimiters;                           // pattern 4

  static PatternSets python();
};

enum class Pattern : std::uint8_t {
  none = 0,
  keyword = 1,
  bracket = 2,
  assignment = 3,
  multiline = 4,
  whitespace = 5,
};

struct Lock {
  Pattern pattern = Pattern::none;
  std::string terminator;  // "\n" for patterns 1 and 3

  friend bool operator==(const Lock&, const Lock&) = default;
};

struct SkipperState {
  std::optional<Lock> lock;
  std::size_t bit_cursor = 0;     // next bit index within the round, 0..X-1
  std::size_t bits_total = 0;     // bits currently assigned, net of rollbacks
  std::size_t line_anchor = 0;    // bits_total as of the last newline-bearing token
  std::size_t rounds = 0;         // completed rounds
  bool previous_embedded = false;

  friend bool operator==(const SkipperState&, const SkipperState&) = default;
};

struct StepDecision {
  enum class Kind : std::uint8_t { embed, skip, rollback };

  Kind kind = Kind::embed;
  Pattern reason = Pattern::none;
  std::size_t rollback = 0;  // bits to rescind before skipping this step

  static StepDecision embed() { return {}; }
  static StepDecision skip(Pattern p) { return {Kind::skip, p, 0}; }
  static StepDecision rescind(std::size_t n, Pattern p) { return {Kind::rollback, p, n}; }

  bool carries_bit() const noexcept { return kind == Kind::embed; }
  friend bool operator==(const StepDecision&, const StepDecision&) = default;
};

const char* to_string(StepDecision::Kind kind);

// Code-structure state machine. inspect() looks at the text of the token just
// produced and decides what the next step does; it is a pure function of the
// token text and the state, so embedding and detection replay it identically.
class Skipper {
 public:
  explicit Skipper(std::size_t watermark_length, PatternSets sets = PatternSets::python());

  std::size_t watermark_length() const noexcept { return length_; }
  const PatternSets& sets() const noexcept { return sets_; }

  StepDecision inspect(std::string_view token_text, SkipperState& state) const;

  // Decision for the very first step when embedding starts without a
  // preceding token.
  StepDecision start(SkipperState& state) const;

  // Records that the bit at state.bit_cursor was just carried by `token`.
  // Wraps the cursor and counts the round when it reaches X.
  void assign_bit(SkipperState& state, HashChain& chain, TokenId token) const;

  // Rescinds up to `count` bits, never past the start of the current round.
  // Returns the number actually rescinded.
  std::size_t rollback_bits(SkipperState& state, HashChain& chain, std::size_t count) const;

  static bool whitespace_only(std::string_view text) noexcept;

 private:
  struct Trigger {
    Pattern pattern = Pattern::none;
    std::size_t pos = 0;
    std::size_t end = 0;
    std::string lexeme;
    std::string terminator;
  };

  std::optional<Trigger> find_trigger(std::string_view text, std::size_t from) const;
  std::size_t match_symbol(std::string_view text, std::size_t pos, const std::vector<std::string>& set) const;
  std::optional<std::size_t> keyword_at(std::string_view text, std::size_t pos) const;

  std::size_t length_;
  PatternSets sets_;
};

}  // namespace codemark
