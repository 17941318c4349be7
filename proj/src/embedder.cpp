#include "codemark/embedder.hpp"

#include "trace_json.hpp"

#include "codemark/error.hpp"
#include "codemark/partition.hpp"

namespace codemark {

const char* to_string(EmbedStatus status) {
  switch (status) {
    case EmbedStatus::complete: return "complete";
    case EmbedStatus::partial: return "partial";
    case EmbedStatus::none: return "none";
  }
  return "?";
}

const char* phase_name(StepPhase p) {
  switch (p) {
    case StepPhase::off: return "off";
    case StepPhase::dormant: return "dormant";
    case StepPhase::active: return "active";
  }
  return "?";
}

EmbedSession::EmbedSession(Vocabulary vocab, WatermarkPayload payload, EmbedConfig config)
    : vocab_(std::move(vocab)),
      payload_(std::move(payload)),
      config_(std::move(config)),
      skipper_(config_.watermark_length, config_.patterns),
      chain_(config_.seed, config_.hash_mode == HashMode::chained),
      tolerance_(config_.watermark_length / 2, 0) {
  config_.validate(vocab_.size());
  if (payload_.total_length() != config_.watermark_length) {
    throw ConfigError("payload has " + std::to_string(payload_.total_length()) + " bits but the watermark length is " +
                      std::to_string(config_.watermark_length));
  }
}

bool EmbedSession::admissible(TokenId token) const {
  return !config_.canonical_tokens || vocab_.extends_canonically(generated_, code_, token);
}

std::optional<TokenId> EmbedSession::pick(std::span<const double> scores, const PartitionMask* favoured) const {
  if (!config_.canonical_tokens) return greedy_argmax(scores, favoured);
  return greedy_argmax(scores, favoured, [this](TokenId t) { return admissible(t); });
}

const EmbedSession::Plan& EmbedSession::plan(std::span<const double> probs) {
  if (pending_) throw SessionError("previous step was planned but never committed");
  if (exhausted()) throw SessionError("session reached max-new-tokens");
  if (probs.size() != vocab_.size()) {
    throw SessionError("distribution has " + std::to_string(probs.size()) + " entries, vocabulary has " +
                       std::to_string(vocab_.size()));
  }

  Pending p;
  StepRecord& rec = p.record;
  rec.step = generated_.size();
  rec.hash_before = chain_.current();

  std::optional<StepDecision> decision;
  if (!config_.watermark) {
    rec.phase = StepPhase::off;
  } else if (active_) {
    decision = skipper_.inspect(vocab_.text(generated_.back()), state_);
  } else if (!config_.start_on_newline) {
    active_ = true;
    decision = skipper_.start(state_);
  } else if (!generated_.empty() && vocab_.text(generated_.back()).find('\n') != std::string_view::npos) {
    active_ = true;
    decision = skipper_.inspect(vocab_.text(generated_.back()), state_);
  }

  if (!decision) {
    if (rec.phase != StepPhase::off) rec.phase = StepPhase::dormant;
    rec.decision = StepDecision::skip(Pattern::none);
    const auto t = pick(probs, nullptr);
    if (!t) throw SessionError("no admissible token at step " + std::to_string(rec.step));
    p.plan.token = *t;
    p.plan.decision = rec.decision;
    p.plan.phase = rec.phase;
    pending_ = std::move(p);
    return pending_->plan;
  }

  rec.phase = StepPhase::active;
  rec.decision = *decision;
  p.plan.decision = *decision;

  if (decision->kind == StepDecision::Kind::rollback) {
    rec.rolled_back = skipper_.rollback_bits(state_, chain_, decision->rollback);
  }

  if (!decision->carries_bit()) {
    const auto t = pick(probs, nullptr);
    if (!t) throw SessionError("no admissible token at step " + std::to_string(rec.step));
    p.plan.token = *t;
    p.plan.phase = rec.phase;
    pending_ = std::move(p);
    return pending_->plan;
  }

  const std::size_t half = config_.watermark_length / 2;
  const std::size_t index = state_.bit_cursor;
  const bool correction = index >= half;
  const std::uint8_t bit = correction ? tolerance_[index - half] : payload_.detection_bits()[index];
  const std::uint64_t hash = chain_.current();

  p.selected = partition(vocab_.size(), hash, config_.gamma);
  p.favoured = bit ? p.selected : p.selected.complement();
  p.report = detect_upper_outliers(probs, config_.outlier_scale);
  // Correction bits are never bent by outliers.
  p.admitted = correction ? p.favoured : augment_partition(p.favoured, p.report, hash);
  p.plan.biased = apply_gap_bias(probs, p.admitted);

  const auto t = pick(p.plan.biased, &p.admitted);
  if (!t) throw SessionError("no admissible token at step " + std::to_string(rec.step));
  p.plan.token = *t;
  p.plan.carries_bit = true;
  p.plan.bit_index = index;

  rec.bit_index = index;
  rec.intended_bit = bit;
  rec.correction_phase = correction;
  rec.outliers = p.report.upper_outliers.size();
  rec.f_upper = p.report.f_upper;
  rec.fallback = !p.admitted.contains(*t);

  p.plan.phase = rec.phase;
  pending_ = std::move(p);
  return pending_->plan;
}

void EmbedSession::commit(TokenId token) {
  if (!pending_) throw SessionError("commit without a planned step");
  if (token >= vocab_.size()) throw SessionError("token id " + std::to_string(token) + " outside the vocabulary");
  Pending p = std::move(*pending_);
  pending_.reset();
  StepRecord& rec = p.record;

  if (p.plan.carries_bit) {
    rec.in_selected = p.selected.contains(token);
    rec.in_favoured = p.admitted.contains(token);
    if (!rec.correction_phase) {
      const std::uint8_t t = tolerance_bit(token, p.report, p.favoured);
      tolerance_[p.plan.bit_index] = t;
      rec.tolerance = t;
    }
    skipper_.assign_bit(state_, chain_, token);
    if (state_.bit_cursor == 0) tolerance_.assign(tolerance_.size(), 0);
  }

  rec.token = token;
  rec.text = std::string(vocab_.text(token));
  rec.hash_after = chain_.current();
  generated_.push_back(token);
  code_ += rec.text;

  TraceSummary& s = trace_.summary;
  ++s.steps;
  if (rec.phase != StepPhase::active) {
    ++s.dormant_steps;
  } else {
    switch (rec.decision.kind) {
      case StepDecision::Kind::embed: ++s.embed_steps; break;
      case StepDecision::Kind::skip: ++s.skip_steps; break;
      case StepDecision::Kind::rollback: ++s.rollback_steps; break;
    }
  }
  s.bits_rescinded += rec.rolled_back;
  s.rounds = state_.rounds;
  s.bits = state_.bits_total;
  s.status = s.rounds >= 1 ? EmbedStatus::complete : (s.bits > 0 ? EmbedStatus::partial : EmbedStatus::none);
  trace_.records.push_back(std::move(rec));
}

EmbedResult EmbedSession::finish() {
  if (pending_) throw SessionError("finish with an uncommitted step");
  EmbedResult r;
  r.tokens = generated_;
  r.code = code_;
  r.trace = trace_;
  r.status = trace_.summary.status;
  return r;
}

EmbedResult embed(std::span<const TokenId> prompt, const WatermarkPayload& payload,
                  TokenDistributionProvider& provider, const Vocabulary& vocab, const EmbedConfig& config) {
  EmbedSession session(vocab, payload, config);
  while (!session.exhausted()) {
    NextToken next = provider.next(prompt, session.generated());
    if (next.end_of_sequence) break;
    const auto& plan = session.plan(next.probs);
    session.commit(plan.token);
  }
  return session.finish();
}

nlohmann::json record_json(const StepRecord& r) {
  using nlohmann::json;
  json j;
  j["step"] = r.step;
  j["token"] = r.token;
  j["text"] = r.text;
  j["phase"] = phase_name(r.phase);
  j["decision"] = to_string(r.decision.kind);
  j["pattern"] = static_cast<int>(r.decision.reason);
  j["rollback"] = r.decision.rollback;
  j["rolled_back"] = r.rolled_back;
  j["bit_index"] = r.bit_index ? json(*r.bit_index) : json(nullptr);
  j["intended_bit"] = r.intended_bit ? json(*r.intended_bit) : json(nullptr);
  j["correction"] = r.correction_phase;
  j["in_selected"] = r.in_selected ? json(*r.in_selected) : json(nullptr);
  j["in_favoured"] = r.in_favoured ? json(*r.in_favoured) : json(nullptr);
  j["outliers"] = r.outliers;
  j["f_upper"] = r.f_upper;
  j["tolerance"] = r.tolerance ? json(*r.tolerance) : json(nullptr);
  j["fallback"] = r.fallback;
  j["hash_before"] = r.hash_before;
  j["hash_after"] = r.hash_after;
  return j;
}

nlohmann::json summary_json(const TraceSummary& s) {
  return {{"steps", s.steps},
          {"dormant", s.dormant_steps},
          {"embedded", s.embed_steps},
          {"skipped", s.skip_steps},
          {"rolled_back", s.rollback_steps},
          {"bits_rescinded", s.bits_rescinded},
          {"rounds", s.rounds},
          {"bits", s.bits},
          {"status", to_string(s.status)}};
}

void write_trace_jsonl(std::ostream& out, const EmbedTrace& trace) {
  for (const auto& r : trace.records) out << record_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  out << nlohmann::json{{"summary", summary_json(trace.summary)}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

}  // namespace codemark
