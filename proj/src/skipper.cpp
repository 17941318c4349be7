#include "codemark/skipper.hpp"

#include <algorithm>

#include "codemark/error.hpp"

namespace codemark {

namespace {

bool ident_char(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

bool has_newline(std::string_view text, std::size_t from, std::size_t to) {
  to = std::min(to, text.size());
  return from < to && text.substr(from, to - from).find('\n') != std::string_view::npos;
}

}  // namespace

const char* to_string(StepDecision::Kind kind) {
  switch (kind) {
    case StepDecision::Kind::embed: return "embed";
    case StepDecision::Kind::skip: return "skip";
    case StepDecision::Kind::rollback: return "rollback";
  }
  return "?";
}

PatternSets PatternSets::python() {
  return PatternSets{
      {"def", "class", "print", "pprint", "int", "float", "str", "for", "while", "if", "elif"},
      {{"(", ")"}, {"[", "]"}, {"'", "'"}, {"\"", "\""}, {"{", "}"}},
      {"=", "==", "#", ">", "<", ">=", "<=", "!="},
      {"\"\"\"", "'''", "```"},
  };
}

Skipper::Skipper(std::size_t watermark_length, PatternSets sets) : length_(watermark_length), sets_(std::move(sets)) {
  if (length_ < 2 || length_ % 2 != 0) {
    throw ConfigError("watermark length must be even and >= 2, got " + std::to_string(length_));
  }
  auto longest_first = [](const std::string& a, const std::string& b) { return a.size() > b.size(); };
  std::stable_sort(sets_.symbols.begin(), sets_.symbols.end(), longest_first);
  std::stable_sort(sets_.delimiters.begin(), sets_.delimiters.end(), longest_first);
  std::stable_sort(sets_.brackets.begin(), sets_.brackets.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

bool Skipper::whitespace_only(std::string_view text) noexcept {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

std::size_t Skipper::match_symbol(std::string_view text, std::size_t pos, const std::vector<std::string>& set) const {
  for (const auto& lexeme : set) {
    if (!lexeme.empty() && text.substr(pos).starts_with(lexeme)) return lexeme.size();
  }
  return 0;
}

std::optional<std::size_t> Skipper::keyword_at(std::string_view text, std::size_t pos) const {
  if (pos > 0 && ident_char(static_cast<unsigned char>(text[pos - 1]))) return std::nullopt;
  std::size_t end = pos;
  while (end < text.size() && ident_char(static_cast<unsigned char>(text[end]))) ++end;
  if (end == pos) return std::nullopt;
  const std::string_view word = text.substr(pos, end - pos);
  if (std::find(sets_.keywords.begin(), sets_.keywords.end(), word) != sets_.keywords.end()) return end;
  return std::nullopt;
}

std::optional<Skipper::Trigger> Skipper::find_trigger(std::string_view text, std::size_t from) const {
  std::optional<Trigger> best;
  auto consider = [&best](Trigger t) {
    if (!best || static_cast<int>(t.pattern) < static_cast<int>(best->pattern)) best = std::move(t);
  };

  std::size_t pos = from;
  while (pos < text.size()) {
    // Maximal munch across delimiters, openers and symbols; equal lengths go
    // to the lower-numbered pattern.
    const std::size_t delim_len = match_symbol(text, pos, sets_.delimiters);
    std::size_t open_len = 0;
    const std::pair<std::string, std::string>* bracket = nullptr;
    for (const auto& b : sets_.brackets) {
      if (!b.first.empty() && text.substr(pos).starts_with(b.first)) {
        open_len = b.first.size();
        bracket = &b;
        break;
      }
    }
    const std::size_t sym_len = match_symbol(text, pos, sets_.symbols);
    const std::size_t longest = std::max({delim_len, open_len, sym_len});

    if (longest > 0) {
      if (open_len == longest) {
        const auto close = text.find(bracket->second, pos + open_len);
        if (close != std::string_view::npos) {
          pos = close + bracket->second.size();  // self-closed pair, contents ignored
          continue;
        }
        consider({Pattern::bracket, pos, pos + open_len, bracket->first, bracket->second});
      } else if (sym_len == longest) {
        const std::string lexeme(text.substr(pos, sym_len));
        consider({Pattern::assignment, pos, pos + sym_len, lexeme, "\n"});
      } else {
        const std::string lexeme(text.substr(pos, delim_len));
        const auto again = text.find(lexeme, pos + delim_len);
        if (again != std::string_view::npos) {
          pos = again + delim_len;
          continue;
        }
        consider({Pattern::multiline, pos, pos + delim_len, lexeme, lexeme});
      }
      pos += longest;
      continue;
    }

    if (const auto end = keyword_at(text, pos)) {
      consider({Pattern::keyword, pos, *end, std::string(text.substr(pos, *end - pos)), "\n"});
      pos = *end;
      continue;
    }
    if (ident_char(static_cast<unsigned char>(text[pos]))) {
      while (pos < text.size() && ident_char(static_cast<unsigned char>(text[pos]))) ++pos;
      continue;
    }
    ++pos;
  }
  return best;
}

StepDecision Skipper::inspect(std::string_view text, SkipperState& state) const {
  std::size_t live = state.bits_total;  // bits_total after any rollback decided here
  const bool carried = state.previous_embedded;
  state.previous_embedded = false;

  if (whitespace_only(text)) {
    const std::size_t k = carried ? std::min<std::size_t>(1, state.bit_cursor) : 0;
    live -= k;
    if (text.find('\n') != std::string_view::npos) {
      state.line_anchor = live;
      if (state.lock && state.lock->terminator == "\n") state.lock.reset();
    }
    return k > 0 ? StepDecision::rescind(k, Pattern::whitespace) : StepDecision::skip(Pattern::whitespace);
  }

  std::size_t pos = 0;
  Pattern locked_by = Pattern::none;
  if (state.lock) {
    locked_by = state.lock->pattern;
    const auto t = text.find(state.lock->terminator);
    if (t == std::string_view::npos) {
      if (has_newline(text, 0, text.size())) state.line_anchor = live;
      return StepDecision::skip(locked_by);
    }
    pos = t + state.lock->terminator.size();
    if (has_newline(text, 0, pos)) state.line_anchor = live;
    state.lock.reset();
  }

  const auto trigger = find_trigger(text, pos);
  if (!trigger) {
    if (has_newline(text, pos, text.size())) state.line_anchor = live;
    if (locked_by != Pattern::none) return StepDecision::skip(locked_by);
    state.previous_embedded = true;
    return StepDecision::embed();
  }

  if (has_newline(text, pos, trigger->pos)) state.line_anchor = live;

  std::size_t k = 0;
  switch (trigger->pattern) {
    case Pattern::assignment:
      if (trigger->lexeme == "#") {
        k = carried ? 1 : 0;
      } else {
        k = live > state.line_anchor ? live - state.line_anchor : 0;
      }
      break;
    case Pattern::multiline:
      k = carried ? 1 : 0;
      break;
    default:
      break;
  }
  k = std::min(k, state.bit_cursor);
  live -= k;

  state.lock = Lock{trigger->pattern, trigger->terminator};
  if (text.find(trigger->terminator, trigger->end) != std::string_view::npos) state.lock.reset();
  if (has_newline(text, trigger->pos, text.size())) state.line_anchor = live;
  state.line_anchor = std::min(state.line_anchor, live);

  return k > 0 ? StepDecision::rescind(k, trigger->pattern) : StepDecision::skip(trigger->pattern);
}

StepDecision Skipper::start(SkipperState& state) const {
  state.previous_embedded = true;
  return StepDecision::embed();
}

void Skipper::assign_bit(SkipperState& state, HashChain& chain, TokenId token) const {
  chain.advance(token, state.bits_total);
  ++state.bits_total;
  if (++state.bit_cursor == length_) {
    state.bit_cursor = 0;
    ++state.rounds;
  }
}

std::size_t Skipper::rollback_bits(SkipperState& state, HashChain& chain, std::size_t count) const {
  const std::size_t n = chain.rollback(std::min(count, state.bit_cursor));
  state.bit_cursor -= n;
  state.bits_total -= n;
  state.line_anchor = std::min(state.line_anchor, state.bits_total);
  return n;
}

}  // namespace codemark
