#include "codemark/attacks.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "codemark/detector.hpp"
#include "codemark/error.hpp"
#include "codemark/hash.hpp"

namespace codemark {

namespace {

constexpr std::string_view kPhrases[] = {
    "check the input first",  "todo handle edge cases", "small helper",        "updated by the maintainer",
    "temporary workaround",   "see the docs for details", "keep this in sync", "fast path",
    "copied from utils",      "refactor later",          "simple version",      "value is cached here",
};

constexpr std::string_view kNames[] = {
    "alpha", "beta", "delta", "omega", "foo", "bar", "baz", "qux", "var_a", "my_value",
    "aux", "holder", "thing", "stuff", "widget", "gadget", "blob", "spam", "eggs", "ham",
};

constexpr std::string_view kLiterals[] = {"0", "1", "None", "[]", "{}", "-1", "True", "42"};

constexpr std::string_view kRedundant[] = {
    "pass",
    "if False:\n@    pass",
    "for _ in range(0):\n@    pass",
    "while False:\n@    break",
    "print(end=\"\")",
};

// Names never chosen as rename targets.
const std::set<std::string, std::less<>>& reserved() {
  static const std::set<std::string, std::less<>> s = {
      "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def",
      "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is",
      "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
      "print", "pprint", "int", "float", "str", "len", "range", "list", "dict", "set", "tuple", "self", "cls",
      "open", "sum", "min", "max", "sorted", "enumerate", "zip", "isinstance", "bool", "abs", "map",
      "filter", "any", "all", "super", "object", "type", "_"};
  return s;
}

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

struct Line {
  std::size_t begin;
  std::size_t end;  // excludes the newline
};

std::vector<Line> split_lines(std::string_view code) {
  std::vector<Line> out;
  std::size_t b = 0;
  while (b <= code.size()) {
    const auto nl = code.find('\n', b);
    if (nl == std::string_view::npos) {
      if (b < code.size()) out.push_back({b, code.size()});
      break;
    }
    out.push_back({b, nl});
    b = nl + 1;
  }
  return out;
}

std::size_t line_of(const std::vector<Line>& lines, std::size_t pos) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (pos <= lines[i].end) return i;
  }
  return lines.size() - 1;
}

std::string_view indentation(std::string_view code, const Line& l) {
  std::size_t e = l.begin;
  while (e < l.end && (code[e] == ' ' || code[e] == '\t')) ++e;
  return code.substr(l.begin, e - l.begin);
}

bool blank(std::string_view code, const Line& l) { return indentation(code, l).size() == l.end - l.begin; }

// Start of line `first` through the newline ending line `last`.
std::pair<std::size_t, std::size_t> line_range(std::string_view code, const std::vector<Line>& lines,
                                               std::size_t first, std::size_t last) {
  const std::size_t end = lines[last].end < code.size() ? lines[last].end + 1 : lines[last].end;
  return {lines[first].begin, end};
}

struct Edit {
  std::size_t begin;
  std::size_t end;
  std::string text;
};

// Applies non-overlapping edits.
std::string apply_edits(std::string_view code, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  std::string out;
  std::size_t at = 0;
  for (const auto& e : edits) {
    if (e.begin < at) continue;
    out.append(code.substr(at, e.begin - at));
    out.append(e.text);
    at = e.end;
  }
  out.append(code.substr(at));
  return out;
}

template <class T>
std::vector<T> pick(std::vector<T> items, std::size_t count, SplitMix64& rng) {
  count = std::min(count, items.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(items[i], items[i + rng.below(items.size() - i)]);
  }
  items.resize(count);
  return items;
}

std::string_view phrase(SplitMix64& rng) { return kPhrases[rng.below(std::size(kPhrases))]; }

std::string fresh_name(const std::set<std::string, std::less<>>& taken, SplitMix64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string n(kNames[rng.below(std::size(kNames))]);
    if (attempt >= 32) n += std::to_string(attempt);
    if (!taken.contains(n)) return n;
  }
  return "renamed_" + std::to_string(rng.below(1000000));
}

class Attacker {
 public:
  Attacker(std::string_view code, std::uint64_t seed, const AttackOptions& options)
      : code_(code), rng_(seed), opt_(options), spans_(lex_python(code)), lines_(split_lines(code)) {
    for (const auto& s : spans_) {
      if (s.kind == Span::Kind::identifier) names_.emplace(code_.substr(s.begin, s.end - s.begin));
    }
  }

  AttackOutcome run(AttackKind kind) {
    switch (kind) {
      case AttackKind::modify_identifiers: return identifiers();
      case AttackKind::modify_io: return io();
      case AttackKind::modify_comments: return comments();
      case AttackKind::modify_user_data: return user_data();
      case AttackKind::modify_assignments: return assignments();
      case AttackKind::add_comments:
      case AttackKind::add_assignments:
      case AttackKind::add_redundant: return insert(kind);
    }
    return noop("unknown kind");
  }

 private:
  AttackOutcome noop(std::string note) const { return {std::string(code_), true, 0, std::move(note)}; }

  AttackOutcome done(std::vector<Edit> edits, std::string note) const {
    const std::size_t n = edits.size();
    return {apply_edits(code_, std::move(edits)), false, n, std::move(note)};
  }

  bool remove_mode() {
    switch (opt_.mode) {
      case AttackOptions::Mode::modify: return false;
      case AttackOptions::Mode::remove: return true;
      case AttackOptions::Mode::either: return rng_.below(2) == 1;
    }
    return false;
  }

  std::string_view text(const Span& s) const { return code_.substr(s.begin, s.end - s.begin); }

  // Index of the previous/next span, if any.
  const Span* neighbour(std::size_t i, int dir) const {
    const long j = static_cast<long>(i) + dir;
    if (j < 0 || j >= static_cast<long>(spans_.size())) return nullptr;
    return &spans_[static_cast<std::size_t>(j)];
  }

  bool only_spaces(std::size_t a, std::size_t b) const {
    return std::all_of(code_.begin() + static_cast<long>(a), code_.begin() + static_cast<long>(b),
                       [](char c) { return c == ' ' || c == '\t'; });
  }

  bool starts_line(std::size_t pos) const {
    std::size_t p = pos;
    while (p > 0 && (code_[p - 1] == ' ' || code_[p - 1] == '\t')) --p;
    return p == 0 || code_[p - 1] == '\n';
  }

  bool ends_line(std::size_t pos) const {
    std::size_t p = pos;
    while (p < code_.size() && (code_[p] == ' ' || code_[p] == '\t')) ++p;
    return p == code_.size() || code_[p] == '\n' || code_[p] == '#';
  }

  // Position of the bracket closing the one at `open`, skipping strings and comments.
  std::optional<std::size_t> matching(std::size_t open) const {
    int depth = 0;
    auto span = std::lower_bound(spans_.begin(), spans_.end(), open,
                                 [](const Span& s, std::size_t p) { return s.begin < p; });
    for (std::size_t p = open; p < code_.size(); ++p) {
      while (span != spans_.end() && span->end <= p) ++span;
      if (span != spans_.end() && span->begin <= p &&
          (span->kind == Span::Kind::string || span->kind == Span::Kind::comment)) {
        p = span->end - 1;
        continue;
      }
      const char c = code_[p];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') {
        if (--depth == 0) return p;
      }
    }
    return std::nullopt;
  }

  AttackOutcome identifiers() {
    std::set<std::string, std::less<>> targets;
    for (std::size_t i = 0; i < spans_.size(); ++i) {
      const Span& s = spans_[i];
      if (s.kind != Span::Kind::identifier || reserved().contains(text(s))) continue;
      if (s.begin > 0 && code_[s.begin - 1] == '.') continue;
      const Span* prev = neighbour(i, -1);
      const bool after_kw = prev && prev->kind == Span::Kind::identifier && only_spaces(prev->end, s.begin) &&
                            (text(*prev) == "def" || text(*prev) == "class" || text(*prev) == "for");
      std::size_t p = s.end;
      while (p < code_.size() && code_[p] == ' ') ++p;
      const bool assigned = starts_line(s.begin) && p < code_.size() && code_[p] == '=' &&
                            (p + 1 >= code_.size() || code_[p + 1] != '=');
      if (after_kw || assigned) targets.emplace(text(s));
    }
    if (targets.empty()) return noop("no user-defined identifiers");
    const auto chosen = pick(std::vector<std::string>(targets.begin(), targets.end()), opt_.intensity, rng_);
    std::vector<Edit> edits;
    std::string note = "renamed";
    auto taken = names_;
    for (const auto& from : chosen) {
      const std::string to = fresh_name(taken, rng_);
      taken.insert(to);
      note += " " + from + "->" + to;
      for (const auto& s : spans_) {
        if (s.kind == Span::Kind::identifier && text(s) == from) edits.push_back({s.begin, s.end, to});
      }
    }
    return done(std::move(edits), note);
  }

  AttackOutcome io() {
    struct Site {
      std::size_t begin, open, close;
    };
    std::vector<Site> sites;
    for (const auto& s : spans_) {
      if (s.kind != Span::Kind::identifier || text(s) != "print") continue;
      if (s.begin > 0 && code_[s.begin - 1] == '.') continue;
      std::size_t p = s.end;
      while (p < code_.size() && code_[p] == ' ') ++p;
      if (p >= code_.size() || code_[p] != '(') continue;
      if (const auto close = matching(p)) sites.push_back({s.begin, p, *close});
    }
    if (sites.empty()) return noop("no print calls");
    std::vector<Edit> edits;
    std::string note;
    for (const auto& site : pick(sites, opt_.intensity, rng_)) {
      if (remove_mode() && starts_line(site.begin) && ends_line(site.close + 1)) {
        const auto [b, e] = line_range(code_, lines_, line_of(lines_, site.begin), line_of(lines_, site.close));
        edits.push_back({b, e, ""});
        note += "removed print; ";
      } else {
        edits.push_back({site.open + 1, site.close, "\"" + std::string(phrase(rng_)) + "\""});
        note += "rewrote print; ";
      }
    }
    return done(std::move(edits), note);
  }

  bool docstring(const Span& s) const {
    return s.kind == Span::Kind::string && s.triple && starts_line(s.begin) && ends_line(s.end);
  }

  AttackOutcome comments() {
    std::vector<const Span*> sites;
    for (const auto& s : spans_) {
      if (s.kind == Span::Kind::comment || docstring(s)) sites.push_back(&s);
    }
    if (sites.empty()) return noop("no comments");
    std::vector<Edit> edits;
    std::string note;
    for (const Span* s : pick(sites, opt_.intensity, rng_)) {
      if (remove_mode()) {
        if (starts_line(s->begin)) {
          const auto [b, e] = line_range(code_, lines_, line_of(lines_, s->begin), line_of(lines_, s->end));
          edits.push_back({b, e, ""});
        } else {
          std::size_t b = s->begin;
          while (b > 0 && (code_[b - 1] == ' ' || code_[b - 1] == '\t')) --b;
          edits.push_back({b, s->end, ""});
        }
        note += "removed comment; ";
      } else {
        edits.push_back({s->body_begin, s->body_end, std::string(phrase(rng_))});
        note += "rewrote comment; ";
      }
    }
    return done(std::move(edits), note);
  }

  AttackOutcome user_data() {
    std::vector<const Span*> sites;
    for (const auto& s : spans_) {
      if ((s.kind == Span::Kind::string && !docstring(s)) || (s.kind == Span::Kind::number && !opt_.strings_only)) {
        sites.push_back(&s);
      }
    }
    if (sites.empty()) return noop("no literals");
    std::vector<Edit> edits;
    std::string note;
    for (const Span* s : pick(sites, opt_.intensity, rng_)) {
      const bool remove = !opt_.strings_only && remove_mode();
      if (s->kind == Span::Kind::string) {
        edits.push_back({s->body_begin, s->body_end, remove ? "" : std::string(phrase(rng_))});
        note += remove ? "emptied string; " : "rewrote string; ";
      } else {
        std::string v = remove ? "0" : std::to_string(2 + rng_.below(998));
        if (v == text(*s)) v += "0";
        edits.push_back({s->begin, s->end, v});
        note += "replaced number; ";
      }
    }
    return done(std::move(edits), note);
  }

  AttackOutcome assignments() {
    static const std::regex assign(R"(^[ \t]*[A-Za-z_][\w.]*(\[[^\]\n]*\])*(,[ \t]*[A-Za-z_][\w.]*)*[ \t]*(\+|-|\*|/|//|%)?=(?!=)[ \t]*)");
    struct Site {
      std::size_t line, rhs_begin, rhs_end;
    };
    std::vector<Site> sites;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const Line& l = lines_[i];
      const std::string line(code_.substr(l.begin, l.end - l.begin));
      std::smatch m;
      if (!std::regex_search(line, m, assign)) continue;
      const std::string lead(m[0]);
      const std::size_t kw = lead.find_first_not_of(" \t");
      const std::size_t kw_end = lead.find_first_not_of("abcdefghijklmnopqrstuvwxyz", kw);
      if (reserved().contains(lead.substr(kw, kw_end - kw))) continue;
      const std::size_t rhs_begin = l.begin + m.length(0);
      std::size_t rhs_end = l.end;
      bool inside_literal = false;
      for (const auto& s : spans_) {
        const bool text_span = s.kind == Span::Kind::string || s.kind == Span::Kind::comment;
        if (text_span && s.begin < rhs_begin && s.end > l.begin) inside_literal = true;
        if (s.kind == Span::Kind::comment && s.begin >= rhs_begin && s.begin < rhs_end) rhs_end = s.begin;
        if (s.kind == Span::Kind::string && s.begin < l.end && s.end > l.end) inside_literal = true;
      }
      while (rhs_end > rhs_begin && (code_[rhs_end - 1] == ' ' || code_[rhs_end - 1] == '\t')) --rhs_end;
      if (inside_literal || rhs_end == rhs_begin) continue;
      // RHS must close on this line.
      int depth = 0;
      for (std::size_t p = rhs_begin; p < rhs_end; ++p) {
        const char c = code_[p];
        depth += (c == '(' || c == '[' || c == '{') - (c == ')' || c == ']' || c == '}');
      }
      if (depth != 0) continue;
      sites.push_back({i, rhs_begin, rhs_end});
    }
    if (sites.empty()) return noop("no assignments");
    std::vector<Edit> edits;
    std::string note;
    for (const auto& s : pick(sites, opt_.intensity, rng_)) {
      if (remove_mode()) {
        const auto [b, e] = line_range(code_, lines_, s.line, s.line);
        edits.push_back({b, e, ""});
        note += "removed assignment; ";
      } else {
        edits.push_back({s.rhs_begin, s.rhs_end, std::string(kLiterals[rng_.below(std::size(kLiterals))])});
        note += "replaced right-hand side; ";
      }
    }
    return done(std::move(edits), note);
  }

  AttackOutcome insert(AttackKind kind) {
    // Start positions of non-blank lines after the first, outside multi-line strings.
    std::vector<std::size_t> sites;
    for (std::size_t i = 1; i < lines_.size(); ++i) {
      const Line& l = lines_[i];
      if (blank(code_, l)) continue;
      const bool in_string = std::any_of(spans_.begin(), spans_.end(), [&](const Span& s) {
        return s.kind == Span::Kind::string && s.begin < l.begin && s.end > l.begin;
      });
      if (in_string) continue;
      if (kind != AttackKind::add_comments) {
        const std::string_view body = code_.substr(l.begin, l.end - l.begin).substr(indentation(code_, l).size());
        const bool continuation = body.starts_with("else") || body.starts_with("elif") ||
                                  body.starts_with("except") || body.starts_with("finally") ||
                                  body.starts_with(")") || body.starts_with("]") || body.starts_with("}");
        if (continuation) continue;
      }
      sites.push_back(i);
    }
    if (sites.empty()) return noop("no insertion point after the first line");
    std::vector<Edit> edits;
    auto taken = names_;
    std::string note;
    for (std::size_t n = 0; n < opt_.intensity; ++n) {
      const Line& l = lines_[sites[rng_.below(sites.size())]];
      const std::string indent(indentation(code_, l));
      std::string stmt;
      switch (kind) {
        case AttackKind::add_comments:
          stmt = "# " + std::string(phrase(rng_));
          note += "inserted comment; ";
          break;
        case AttackKind::add_assignments: {
          const std::string name = fresh_name(taken, rng_);
          taken.insert(name);
          stmt = name + " = " + std::string(kLiterals[rng_.below(std::size(kLiterals))]);
          note += "inserted assignment; ";
          break;
        }
        default: {
          stmt = std::string(kRedundant[rng_.below(std::size(kRedundant))]);
          for (auto at = stmt.find('@'); at != std::string::npos; at = stmt.find('@')) stmt.replace(at, 1, indent);
          note += "inserted statement; ";
          break;
        }
      }
      edits.push_back({l.begin, l.begin, indent + stmt + "\n"});
    }
    // Several insertions at one point keep their draw order.
    std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
    std::string out;
    std::size_t at = 0;
    for (const auto& e : edits) {
      out.append(code_.substr(at, e.begin - at));
      out.append(e.text);
      at = e.begin;
    }
    out.append(code_.substr(at));
    return {std::move(out), false, edits.size(), note};
  }

  std::string_view code_;
  SplitMix64 rng_;
  AttackOptions opt_;
  std::vector<Span> spans_;
  std::vector<Line> lines_;
  std::set<std::string, std::less<>> names_;
};

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::modify_identifiers: return "modify-identifiers";
    case AttackKind::modify_io: return "modify-io";
    case AttackKind::modify_comments: return "modify-comments";
    case AttackKind::modify_user_data: return "modify-user-data";
    case AttackKind::modify_assignments: return "modify-assignments";
    case AttackKind::add_comments: return "add-comments";
    case AttackKind::add_assignments: return "add-assignments";
    case AttackKind::add_redundant: return "add-redundant";
  }
  return "?";
}

AttackKind parse_attack_kind(const std::string& text) {
  for (AttackKind k : kAllAttacks) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown attack kind '" + text + "'");
}

bool is_insertion(AttackKind kind) {
  return kind == AttackKind::add_comments || kind == AttackKind::add_assignments ||
         kind == AttackKind::add_redundant;
}

std::vector<Span> lex_python(std::string_view code) {
  std::vector<Span> out;
  std::size_t p = 0;
  const std::size_t n = code.size();
  while (p < n) {
    const char c = code[p];
    if (c == '#') {
      const std::size_t e = std::min(code.find('\n', p), n);
      std::size_t body = p + 1;
      if (body < e && code[body] == ' ') ++body;
      out.push_back({Span::Kind::comment, p, e, body, e, false});
      p = e;
    } else if (c == '"' || c == '\'') {
      const bool triple = p + 2 < n && code[p + 1] == c && code[p + 2] == c;
      const std::size_t q = triple ? 3 : 1;
      std::size_t e = p + q;
      std::size_t body_end = n;
      while (e < n) {
        if (code[e] == '\\') {
          e += 2;
          continue;
        }
        if (!triple && code[e] == '\n') {
          body_end = e;
          break;
        }
        if (code[e] == c && (!triple || (e + 2 < n && code[e + 1] == c && code[e + 2] == c))) {
          body_end = e;
          e += q;
          break;
        }
        ++e;
      }
      e = std::min(e, n);
      body_end = std::min(body_end, e);
      out.push_back({Span::Kind::string, p, e, p + q, body_end, triple});
      p = e;
    } else if (ident_start(c)) {
      std::size_t e = p;
      while (e < n && ident_char(code[e])) ++e;
      out.push_back({Span::Kind::identifier, p, e, p, e, false});
      p = e;
    } else if (digit(c)) {
      std::size_t e = p;
      while (e < n && (ident_char(code[e]) || code[e] == '.')) ++e;
      out.push_back({Span::Kind::number, p, e, p, e, false});
      p = e;
    } else {
      ++p;
    }
  }
  return out;
}

AttackOutcome apply_attack(std::string_view code, AttackKind kind, std::uint64_t seed, const AttackOptions& options) {
  if (options.intensity == 0) return {std::string(code), true, 0, "intensity 0"};
  return Attacker(code, avalanche(seed ^ (static_cast<std::uint64_t>(kind) + 1) * kGoldenGamma), options).run(kind);
}

std::size_t SurvivalMatrix::survived() const {
  std::size_t s = 0;
  for (const auto& r : rows) s += r.survived;
  return s;
}

std::size_t SurvivalMatrix::total() const {
  std::size_t t = 0;
  for (const auto& r : rows) t += r.total;
  return t;
}

SurvivalMatrix robustness_eval(const std::vector<Sample>& samples, const std::vector<AttackKind>& kinds,
                               std::size_t trials, const Vocabulary& vocab, const EmbedConfig& config,
                               std::uint64_t seed, const AttackOptions& options) {
  SurvivalMatrix m;
  for (AttackKind k : kinds) m.rows.push_back({k});
  std::vector<const Sample*> usable;
  for (const auto& s : samples) {
    const auto r = detect(s.code, vocab, config);
    if (r.detected && r.user_bits == s.expected) {
      usable.push_back(&s);
    } else {
      ++m.excluded;
    }
  }
  for (std::size_t si = 0; si < usable.size(); ++si) {
    for (auto& row : m.rows) {
      for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = avalanche(seed ^ avalanche((si << 20) ^ (static_cast<std::uint64_t>(row.kind) << 12) ^ t));
        const auto attacked = apply_attack(usable[si]->code, row.kind, trial_seed, options);
        ++row.total;
        if (attacked.noop) ++row.noop;
        const auto r = detect(attacked.code, vocab, config);
        if (r.detected && r.user_bits == usable[si]->expected) ++row.survived;
      }
    }
  }
  return m;
}

}  // namespace codemark
