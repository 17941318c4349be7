#include "codemark/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "codemark/error.hpp"
#include "codemark/hash.hpp"

namespace codemark {

namespace {

std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return avalanche(seed ^ avalanche(a * kGoldenGamma + avalanche(b + 0x632BE59BD9B4E019ULL)));
}

void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
}

bool python_keyword(std::string_view word) {
  static constexpr std::string_view kWords[] = {
      "False", "None",   "True",    "and",  "as",     "assert", "async", "await", "break",
      "class", "continue", "def",   "del",  "elif",   "else",   "except", "finally", "for",
      "from",  "global", "if",      "import", "in",   "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise",   "return", "try",  "while",  "with",  "yield", "print",
      "pprint", "int",   "float",   "str",  "self",   "open",   "len",   "range"};
  return std::find(std::begin(kWords), std::end(kWords), word) != std::end(kWords);
}

}  // namespace

const char* to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::seeded_random: return "seeded-random";
    case ProviderKind::scripted: return "scripted";
    case ProviderKind::code_template: return "code-template";
  }
  return "?";
}

ProviderKind parse_provider_kind(const std::string& text) {
  if (text == "seeded-random" || text == "random") return ProviderKind::seeded_random;
  if (text == "scripted" || text == "script") return ProviderKind::scripted;
  if (text == "code-template" || text == "template") return ProviderKind::code_template;
  throw ConfigError("unknown provider kind '" + text + "'");
}

std::vector<TokenId> identifier_tokens(const Vocabulary& vocab) {
  std::vector<TokenId> out;
  for (TokenId id = 0; id < vocab.size(); ++id) {
    std::string_view t = vocab.text(id);
    if (t.starts_with(' ')) t.remove_prefix(1);
    if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) continue;
    const bool word = std::all_of(t.begin(), t.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
    if (word && !python_keyword(t)) out.push_back(id);
  }
  return out;
}

SeededRandomProvider::SeededRandomProvider(const Vocabulary& vocab, std::uint64_t seed, double outlier_rate,
                                           std::size_t max_length)
    : vocab_size_(vocab.size()), seed_(seed), outlier_rate_(outlier_rate), max_length_(max_length),
      newline_(vocab.size(), 0) {
  for (TokenId id = 0; id < vocab.size(); ++id) {
    newline_[id] = vocab.text(id).find('\n') != std::string_view::npos;
  }
}

NextToken SeededRandomProvider::next(std::span<const TokenId>, std::span<const TokenId> generated) {
  if (max_length_ > 0 && generated.size() >= max_length_) return {{}, true};
  const std::uint64_t last = generated.empty() ? vocab_size_ : generated.back();
  SplitMix64 rng(key(seed_, last));
  std::vector<double> w(vocab_size_);
  for (std::size_t i = 0; i < vocab_size_; ++i) {
    const double u = rng.unit();
    w[i] = std::pow(u, 8.0) + 1e-4;
    if (newline_[i]) w[i] *= 3.0;
  }
  if (rng.unit() < outlier_rate_) {
    const std::size_t dominant = rng.below(vocab_size_);
    const double rest = std::accumulate(w.begin(), w.end(), 0.0) - w[dominant];
    w[dominant] = rest;  // half of the total mass
  }
  normalize(w);
  return {std::move(w), false};
}

ScriptedProvider::ScriptedProvider(std::size_t vocab_size, std::vector<TokenId> script)
    : vocab_size_(vocab_size), script_(std::move(script)) {
  if (script_.empty()) throw ConfigError("scripted provider needs a non-empty script");
  if (vocab_size_ < 2) throw ConfigError("scripted provider needs at least two tokens");
  for (TokenId t : script_) {
    if (t >= vocab_size_) throw ConfigError("script token " + std::to_string(t) + " outside the vocabulary");
  }
}

NextToken ScriptedProvider::next(std::span<const TokenId>, std::span<const TokenId> generated) {
  const std::size_t n = generated.size();
  if (n >= script_.size()) return {{}, true};
  std::vector<double> p(vocab_size_, (1.0 - kScriptMass) / static_cast<double>(vocab_size_ - 1));
  p[script_[n]] = kScriptMass;
  return {std::move(p), false};
}

std::string fill_template_holes(std::string_view code, const Vocabulary& vocab, std::uint64_t seed) {
  std::vector<std::string_view> names;
  for (TokenId id : identifier_tokens(vocab)) {
    if (!vocab.text(id).starts_with(' ')) names.push_back(vocab.text(id));
  }
  std::string out;
  std::vector<std::pair<std::string, std::string_view>> chosen;
  std::size_t pos = 0;
  while (pos < code.size()) {
    const auto open = code.find("{{", pos);
    const auto close = open == std::string_view::npos ? open : code.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string_view hole = code.substr(open + 2, close - open - 2);
    const bool word = !hole.empty() && std::all_of(hole.begin(), hole.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
    out.append(code.substr(pos, open - pos));
    if (!word || names.empty()) {
      out.append(code.substr(open, close + 2 - open));
    } else {
      auto it = std::find_if(chosen.begin(), chosen.end(), [&](const auto& c) { return c.first == hole; });
      if (it == chosen.end()) {
        // Distinct holes get distinct names where the bank allows it.
        std::uint64_t salt = 0;
        std::string_view pick;
        do {
          std::uint64_t h = 0;
          for (char c : hole) h = HashChain::mix(h, static_cast<unsigned char>(c));
          pick = names[SplitMix64(key(seed, h, salt++)).below(names.size())];
        } while (salt < 64 && std::any_of(chosen.begin(), chosen.end(), [&](const auto& c) { return c.second == pick; }));
        chosen.emplace_back(std::string(hole), pick);
        it = chosen.end() - 1;
      }
      out.append(it->second);
    }
    pos = close + 2;
  }
  out.append(code.substr(pos));
  return out;
}

CodeTemplateProvider::CodeTemplateProvider(const Vocabulary& vocab, const std::string& code, std::uint64_t seed,
                                           std::size_t alternatives)
    : vocab_size_(vocab.size()), seed_(seed), alternatives_(alternatives),
      skeleton_(vocab.tokenize(fill_template_holes(code, vocab, seed))), pool_(identifier_tokens(vocab)) {
  if (skeleton_.empty()) throw ConfigError("code template is empty");
}

NextToken CodeTemplateProvider::next(std::span<const TokenId>, std::span<const TokenId> generated) {
  const std::size_t n = generated.size();
  if (n >= skeleton_.size()) return {{}, true};
  SplitMix64 rng(key(seed_, n, 1));
  std::vector<double> w(vocab_size_);
  for (double& x : w) x = 0.5 + rng.unit();
  const double floor_mass = std::accumulate(w.begin(), w.end(), 0.0);
  // Floor carries 10% of the mass; the skeleton token 60%; alternatives the rest.
  for (double& x : w) x *= 0.10 / floor_mass;
  const TokenId target = skeleton_[n];
  w[target] += 0.60;
  if (!pool_.empty()) {
    double share = 0.30;
    const std::size_t k = std::min(alternatives_, pool_.size());
    for (std::size_t i = 0; i < k; ++i) {
      const TokenId alt = pool_[rng.below(pool_.size())];
      const double m = share * 0.35;
      w[alt] += m;
      share -= m;
    }
    w[target] += share;
  } else {
    w[target] += 0.30;
  }
  normalize(w);
  return {std::move(w), false};
}

std::unique_ptr<TokenDistributionProvider> make_mock_provider(const Vocabulary& vocab, const ProviderSpec& spec) {
  switch (spec.kind) {
    case ProviderKind::seeded_random:
      return std::make_unique<SeededRandomProvider>(vocab, spec.seed, spec.outlier_rate, spec.max_length);
    case ProviderKind::scripted:
      return std::make_unique<ScriptedProvider>(vocab.size(), spec.script);
    case ProviderKind::code_template:
      if (spec.template_code.empty()) throw ConfigError("code-template provider needs a template");
      return std::make_unique<CodeTemplateProvider>(vocab, spec.template_code, spec.seed);
  }
  throw ConfigError("unknown provider kind");
}

}  // namespace codemark
