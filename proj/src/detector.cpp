#include "codemark/detector.hpp"

#include "codemark/error.hpp"
#include "codemark/hash.hpp"
#include "codemark/partition.hpp"

namespace codemark {

const char* to_string(DetectFailure reason) {
  switch (reason) {
    case DetectFailure::insufficient_bits: return "insufficient-bits";
    case DetectFailure::round_conflict: return "round-conflict";
    case DetectFailure::tokenization_error: return "tokenization-error";
    case DetectFailure::no_newline_anchor: return "no-newline-anchor";
  }
  return "?";
}

Extraction extract_bits(std::span<const TokenId> tokens, const Vocabulary& vocab, const EmbedConfig& config) {
  const std::size_t length = config.watermark_length;
  Skipper skipper(length, config.patterns);
  SkipperState state;
  HashChain chain(config.seed, config.hash_mode == HashMode::chained);
  Extraction ex;

  std::size_t first = 0;
  if (config.start_on_newline) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (vocab.text(tokens[i]).find('\n') != std::string_view::npos) {
        ex.anchor = i;
        break;
      }
    }
    if (!ex.anchor) return ex;
    first = *ex.anchor + 1;
  }

  // Bits of the round in progress; rescinded positions are overwritten.
  Bits current(length, 0);
  ex.steps.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ReplayStep step;
    step.index = i;
    step.token = tokens[i];
    step.hash_before = chain.current();
    if (i < first) {
      step.decision = StepDecision::skip(Pattern::none);
      ex.steps.push_back(step);
      continue;
    }
    step.active = true;
    step.decision = i == 0 ? skipper.start(state) : skipper.inspect(vocab.text(tokens[i - 1]), state);
    if (step.decision.kind == StepDecision::Kind::rollback) {
      step.rolled_back = skipper.rollback_bits(state, chain, step.decision.rollback);
    }
    if (step.decision.carries_bit()) {
      const PartitionMask selected = partition(vocab.size(), chain.current(), config.gamma);
      const std::uint8_t bit = selected.contains(tokens[i]) ? 1 : 0;
      step.bit_index = state.bit_cursor;
      step.bit = bit;
      current[state.bit_cursor] = bit;
      skipper.assign_bit(state, chain, tokens[i]);
      if (state.bit_cursor == 0) ex.rounds.push_back(current);
    }
    ex.steps.push_back(step);
  }
  ex.trailing.assign(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(state.bit_cursor));
  return ex;
}

DetectionResult decide(Extraction extraction, const EmbedConfig& config) {
  DetectionResult r;
  const std::size_t half = config.watermark_length / 2;
  if (config.start_on_newline && !extraction.anchor) {
    r.reason = DetectFailure::no_newline_anchor;
    r.message = "no token contains a newline";
    r.extraction = std::move(extraction);
    return r;
  }
  if (extraction.rounds.empty()) {
    r.reason = DetectFailure::insufficient_bits;
    r.message = "only " + std::to_string(extraction.trailing.size()) + " of " +
                std::to_string(config.watermark_length) + " bits recovered";
    r.extraction = std::move(extraction);
    return r;
  }
  for (const Bits& round : extraction.rounds) {
    const Bits observed(round.begin(), round.begin() + static_cast<std::ptrdiff_t>(half));
    const Bits correction(round.begin() + static_cast<std::ptrdiff_t>(half), round.end());
    r.recovered.push_back(recover(observed, correction));
  }
  r.rounds_used = r.recovered.size();
  for (const Bits& bits : r.recovered) {
    if (bits != r.recovered.front()) {
      r.reason = DetectFailure::round_conflict;
      r.message = std::to_string(r.recovered.size()) + " rounds disagree";
      r.extraction = std::move(extraction);
      return r;
    }
  }
  r.detected = true;
  r.user_bits = r.recovered.front();
  r.extraction = std::move(extraction);
  return r;
}

DetectionResult detect(std::string_view code, const Vocabulary& vocab, const EmbedConfig& config) {
  std::vector<TokenId> tokens;
  try {
    tokens = vocab.tokenize(code);
  } catch (const TokenizeError& e) {
    DetectionResult r;
    r.reason = DetectFailure::tokenization_error;
    r.message = e.what();
    return r;
  }
  return decide(extract_bits(tokens, vocab, config), config);
}

}  // namespace codemark
