#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codemark/vocab.hpp"

namespace codemark {

struct NextToken {
  std::vector<double> probs;  // one entry per vocabulary id
  bool end_of_sequence = false;
};

// Stands in for the model: maps (prompt, generated-so-far) to a distribution
// over the session vocabulary. Implementations must be deterministic in the
// history.
class TokenDistributionProvider {
 public:
  virtual ~TokenDistributionProvider() = default;
  virtual NextToken next(std::span<const TokenId> prompt, std::span<const TokenId> generated) = 0;
};

enum class ProviderKind : std::uint8_t { seeded_random, scripted, code_template };

const char* to_string(ProviderKind kind);
ProviderKind parse_provider_kind(const std::string& text);

// Markov-style random provider: the distribution depends on the seed and the
// last generated token only. Newline-bearing tokens are boosted so generations
// leave the dormant phase. With probability `outlier_rate` a step gets one
// dominant token holding half the mass.
class SeededRandomProvider final : public TokenDistributionProvider {
 public:
  SeededRandomProvider(const Vocabulary& vocab, std::uint64_t seed, double outlier_rate = 0.2,
                       std::size_t max_length = 0);
  NextToken next(std::span<const TokenId> prompt, std::span<const TokenId> generated) override;

 private:
  std::size_t vocab_size_;
  std::uint64_t seed_;
  double outlier_rate_;
  std::size_t max_length_;  // 0 = never ends
  std::vector<std::uint8_t> newline_;
};

// Puts most of the mass on script[n] at step n; ends after the script.
class ScriptedProvider final : public TokenDistributionProvider {
 public:
  ScriptedProvider(std::size_t vocab_size, std::vector<TokenId> script);
  NextToken next(std::span<const TokenId> prompt, std::span<const TokenId> generated) override;

  static constexpr double kScriptMass = 0.6;

 private:
  std::size_t vocab_size_;
  std::vector<TokenId> script_;
};

// Walks a tokenized code skeleton: at step n the skeleton token is dominant,
// a handful of identifier-like alternatives (chosen by seed and step) come
// next, and everything else gets a small random floor. Ends with the skeleton.
class CodeTemplateProvider final : public TokenDistributionProvider {
 public:
  CodeTemplateProvider(const Vocabulary& vocab, const std::string& code, std::uint64_t seed,
                       std::size_t alternatives = 8);
  NextToken next(std::span<const TokenId> prompt, std::span<const TokenId> generated) override;

  const std::vector<TokenId>& skeleton() const noexcept { return skeleton_; }

 private:
  std::size_t vocab_size_;
  std::uint64_t seed_;
  std::size_t alternatives_;
  std::vector<TokenId> skeleton_;
  std::vector<TokenId> pool_;
};

struct ProviderSpec {
  ProviderKind kind = ProviderKind::code_template;
  std::uint64_t seed = 1;
  std::vector<TokenId> script;  // scripted
  std::string template_code;    // code_template
  double outlier_rate = 0.2;    // seeded_random
  std::size_t max_length = 0;   // seeded_random
};

// Throws ConfigError for an empty script or template.
std::unique_ptr<TokenDistributionProvider> make_mock_provider(const Vocabulary& vocab, const ProviderSpec& spec);

// Replaces every {{name}} marker with an identifier from the vocabulary chosen
// by seed; repeated markers get the same identifier.
std::string fill_template_holes(std::string_view code, const Vocabulary& vocab, std::uint64_t seed);

// Identifier-shaped tokens (optionally with one leading space) that are not
// Python keywords or the trigger keywords.
std::vector<TokenId> identifier_tokens(const Vocabulary& vocab);

}  // namespace codemark
