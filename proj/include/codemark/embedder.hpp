#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "codemark/config.hpp"
#include "codemark/outlier.hpp"
#include "codemark/payload.hpp"
#include "codemark/provider.hpp"
#include "codemark/skipper.hpp"
#include "codemark/vocab.hpp"

namespace codemark {

enum class EmbedStatus : std::uint8_t {
  complete,  // at least one full round
  partial,   // some bits, no full round
  none,      // no bits at all
};

const char* to_string(EmbedStatus status);

enum class StepPhase : std::uint8_t { off, dormant, active };

// Audit record for one generated token.
struct StepRecord {
  std::size_t step = 0;
  TokenId token = 0;
  std::string text;
  StepPhase phase = StepPhase::dormant;
  StepDecision decision;
  std::size_t rolled_back = 0;  // bits actually rescinded (after clamping)
  std::optional<std::size_t> bit_index;
  std::optional<std::uint8_t> intended_bit;
  bool correction_phase = false;
  std::optional<bool> in_selected;  // sampled token in D (the "1" side)
  std::optional<bool> in_favoured;  // sampled token in the biased side, after augmentation
  std::size_t outliers = 0;
  double f_upper = 0.0;
  std::optional<std::uint8_t> tolerance;
  bool fallback = false;  // no admissible token on the intended side
  std::uint64_t hash_before = 0;
  std::uint64_t hash_after = 0;
};

struct TraceSummary {
  std::size_t steps = 0;
  std::size_t dormant_steps = 0;
  std::size_t embed_steps = 0;
  std::size_t skip_steps = 0;
  std::size_t rollback_steps = 0;
  std::size_t bits_rescinded = 0;
  std::size_t rounds = 0;
  std::size_t bits = 0;  // bits standing at the end, net of rollbacks
  EmbedStatus status = EmbedStatus::none;
};

struct EmbedTrace {
  std::vector<StepRecord> records;
  TraceSummary summary;
};

struct EmbedResult {
  std::vector<TokenId> tokens;
  std::string code;
  EmbedTrace trace;
  EmbedStatus status = EmbedStatus::none;
};

// Step-wise embedding loop. plan() decides the step and picks a token from the
// provider's distribution; commit() records the token that was actually
// emitted (normally the planned one).
class EmbedSession {
 public:
  struct Plan {
    TokenId token = 0;
    StepPhase phase = StepPhase::dormant;
    StepDecision decision;
    bool carries_bit = false;
    std::size_t bit_index = 0;
    std::vector<double> biased;  // empty unless the step carries a bit
  };

  EmbedSession(Vocabulary vocab, WatermarkPayload payload, EmbedConfig config);

  const Plan& plan(std::span<const double> probs);
  void commit(TokenId token);
  // Drops a planned step without emitting a token. Skip-pattern state already
  // advanced by plan() is kept, so only call this when the session is ending.
  void discard() noexcept { pending_.reset(); }

  bool exhausted() const noexcept { return generated_.size() >= config_.max_new_tokens; }
  bool pending() const noexcept { return pending_.has_value(); }
  const std::vector<TokenId>& generated() const noexcept { return generated_; }
  const std::string& code() const noexcept { return code_; }
  const EmbedTrace& trace() const noexcept { return trace_; }
  const SkipperState& skipper_state() const noexcept { return state_; }
  std::uint64_t hash() const noexcept { return chain_.current(); }
  const EmbedConfig& config() const noexcept { return config_; }
  const Vocabulary& vocab() const noexcept { return vocab_; }

  EmbedResult finish();

 private:
  struct Pending {
    Plan plan;
    StepRecord record;
    PartitionMask selected;  // D
    PartitionMask favoured;  // side named by the bit, before outlier admission
    PartitionMask admitted;  // side that received the gap bias
    OutlierReport report;
  };

  bool admissible(TokenId token) const;
  std::optional<TokenId> pick(std::span<const double> scores, const PartitionMask* favoured) const;

  Vocabulary vocab_;
  WatermarkPayload payload_;
  EmbedConfig config_;
  Skipper skipper_;
  SkipperState state_;
  HashChain chain_;
  bool active_ = false;
  Bits tolerance_;
  std::vector<TokenId> generated_;
  std::string code_;
  EmbedTrace trace_;
  std::optional<Pending> pending_;
};

// Runs a full session against `provider` until end-of-sequence or
// max_new_tokens. Throws ConfigError / SessionError.
EmbedResult embed(std::span<const TokenId> prompt, const WatermarkPayload& payload,
                  TokenDistributionProvider& provider, const Vocabulary& vocab, const EmbedConfig& config);

// One JSON object per line, stable field names.
void write_trace_jsonl(std::ostream& out, const EmbedTrace& trace);

}  // namespace codemark
