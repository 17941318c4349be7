#include "codemark/eval.hpp"

#include <cstdio>

#include "codemark/detector.hpp"
#include "codemark/error.hpp"
#include "codemark/hash.hpp"

namespace codemark {

std::vector<EvalTask> make_tasks(std::size_t count, const std::vector<std::string>& templates, std::uint64_t seed,
                                 std::size_t watermark_length, ProviderKind kind) {
  SplitMix64 rng(seed);
  const std::size_t half = watermark_length / 2;
  std::vector<EvalTask> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    EvalTask t;
    t.provider.seed = rng.next();
    t.user_id = half >= 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << half) - 1);
    if (kind == ProviderKind::code_template && !templates.empty()) {
      t.provider.kind = ProviderKind::code_template;
      t.provider.template_code = templates[i % templates.size()];
    } else {
      t.provider.kind = ProviderKind::seeded_random;
    }
    out.push_back(std::move(t));
  }
  return out;
}

TaskOutcome run_task(const Vocabulary& vocab, const EvalTask& task, const EmbedConfig& config) {
  const auto payload = WatermarkPayload::for_user(task.user_id, config.watermark_length);
  auto provider = make_mock_provider(vocab, task.provider);
  auto r = embed({}, payload, *provider, vocab, config);
  TaskOutcome o;
  o.status = r.status;
  o.expected = payload.detection_bits();
  if (r.status == EmbedStatus::complete) {
    const auto d = detect(r.code, vocab, config);
    o.detected = d.detected && d.user_bits == o.expected;
  }
  o.code = std::move(r.code);
  return o;
}

const char* to_string(SweepKnob knob) {
  switch (knob) {
    case SweepKnob::gamma: return "gamma";
    case SweepKnob::max_tokens: return "max-new-tokens";
    case SweepKnob::hash_mode: return "hash-mode";
  }
  return "?";
}

SweepKnob parse_sweep_knob(const std::string& text) {
  if (text == "gamma") return SweepKnob::gamma;
  if (text == "max-new-tokens" || text == "max-tokens" || text == "L") return SweepKnob::max_tokens;
  if (text == "hash-mode" || text == "hash") return SweepKnob::hash_mode;
  throw ConfigError("unknown sweep knob '" + text + "'");
}

std::vector<SweepRow> run_sweep(const Vocabulary& vocab, const std::vector<EvalTask>& tasks, const EmbedConfig& base,
                                SweepKnob knob, const std::vector<std::string>& values) {
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    EmbedConfig c = base;
    switch (knob) {
      case SweepKnob::gamma: c.gamma = std::stod(v); break;
      case SweepKnob::max_tokens: c.max_new_tokens = std::stoul(v); break;
      case SweepKnob::hash_mode: c.hash_mode = parse_hash_mode(v); break;
    }
    c.validate(vocab.size());
    SweepRow row;
    row.value = v;
    for (const auto& t : tasks) {
      const auto o = run_task(vocab, t, c);
      ++row.tasks;
      switch (o.status) {
        case EmbedStatus::complete: ++row.complete; break;
        case EmbedStatus::partial: ++row.partial; break;
        case EmbedStatus::none: ++row.none; break;
      }
      row.detected += o.detected;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_tsv(std::ostream& out, SweepKnob knob, const std::vector<SweepRow>& rows) {
  out << to_string(knob) << "\ttasks\tcomplete\tpartial\tnone\tdetected\tembed_rate\tdetect_rate\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f", r.embed_rate(), r.detect_rate());
    out << r.value << '\t' << r.tasks << '\t' << r.complete << '\t' << r.partial << '\t' << r.none << '\t'
        << r.detected << '\t' << buf << '\n';
  }
}

void write_survival_tsv(std::ostream& out, const SurvivalMatrix& m) {
  out << "attack\ttype\tsurvived\ttotal\tnoop\trate\n";
  char buf[32];
  for (const auto& r : m.rows) {
    std::snprintf(buf, sizeof buf, "%.4f", r.total ? static_cast<double>(r.survived) / r.total : 0.0);
    out << to_string(r.kind) << '\t' << (is_insertion(r.kind) ? 2 : 1) << '\t' << r.survived << '\t' << r.total
        << '\t' << r.noop << '\t' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.4f", m.total() ? static_cast<double>(m.survived()) / m.total() : 0.0);
  out << "total\t-\t" << m.survived() << '\t' << m.total() << "\t-\t" << buf << '\n';
  if (m.excluded) out << "# excluded samples (no detection before attack): " << m.excluded << '\n';
}

}  // namespace codemark
