#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codemark/config.hpp"
#include "codemark/payload.hpp"
#include "codemark/skipper.hpp"
#include "codemark/vocab.hpp"

namespace codemark {

enum class DetectFailure : std::uint8_t {
  insufficient_bits,
  round_conflict,
  tokenization_error,
  no_newline_anchor,
};

const char* to_string(DetectFailure reason);

// What the detector decided for one token of the input.
struct ReplayStep {
  std::size_t index = 0;  // token index in the tokenized input
  TokenId token = 0;
  bool active = false;
  StepDecision decision;
  std::size_t rolled_back = 0;
  std::optional<std::size_t> bit_index;
  std::optional<std::uint8_t> bit;
  std::uint64_t hash_before = 0;
};

// Raw bit stream recovered from a token sequence, before consensus.
struct Extraction {
  std::optional<std::size_t> anchor;  // first token containing '\n'
  std::vector<ReplayStep> steps;
  std::vector<Bits> rounds;  // complete X-bit segments, in order
  Bits trailing;             // incomplete last segment (discarded by detect)
};

struct DetectionResult {
  bool detected = false;
  Bits user_bits;
  std::size_t rounds_used = 0;
  std::optional<DetectFailure> reason;
  std::string message;
  std::vector<Bits> recovered;  // per-round user bits
  Extraction extraction;
};

// Replays the skip patterns and hash chain over `tokens`, reading one bit per
// surviving token from partition membership.
Extraction extract_bits(std::span<const TokenId> tokens, const Vocabulary& vocab, const EmbedConfig& config);

// Segmentation and consensus over an extraction: every complete round must
// recover the same user bits.
DetectionResult decide(Extraction extraction, const EmbedConfig& config);

// Tokenize, extract, decide. Never throws on well-formed inputs; failures are
// reported through `reason`.
DetectionResult detect(std::string_view code, const Vocabulary& vocab, const EmbedConfig& config);

}  // namespace codemark
