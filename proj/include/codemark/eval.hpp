#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "codemark/attacks.hpp"
#include "codemark/config.hpp"
#include "codemark/embedder.hpp"
#include "codemark/provider.hpp"
#include "codemark/vocab.hpp"

namespace codemark {

// One mock generation task: a provider plus the user id to embed.
struct EvalTask {
  ProviderSpec provider;
  std::uint64_t user_id = 0;
};

// `count` tasks cycling through `templates` (code-template kind) or, when
// none are given, seeded-random providers. User ids are drawn below
// 2^(watermark_length / 2).
std::vector<EvalTask> make_tasks(std::size_t count, const std::vector<std::string>& templates, std::uint64_t seed,
                                 std::size_t watermark_length = 24, ProviderKind kind = ProviderKind::code_template);

struct TaskOutcome {
  EmbedStatus status = EmbedStatus::none;
  bool detected = false;  // detected with the embedded id
  std::string code;
  Bits expected;
};

TaskOutcome run_task(const Vocabulary& vocab, const EvalTask& task, const EmbedConfig& config);

enum class SweepKnob : std::uint8_t { gamma, max_tokens, hash_mode };

const char* to_string(SweepKnob knob);
SweepKnob parse_sweep_knob(const std::string& text);

struct SweepRow {
  std::string value;
  std::size_t tasks = 0;
  std::size_t complete = 0;
  std::size_t partial = 0;
  std::size_t none = 0;
  std::size_t detected = 0;

  double embed_rate() const { return tasks ? static_cast<double>(complete) / static_cast<double>(tasks) : 0.0; }
  double detect_rate() const { return tasks ? static_cast<double>(detected) / static_cast<double>(tasks) : 0.0; }
};

// Varies exactly one knob of `base`; every other setting is held fixed.
// Values are parsed per knob ("0.25", "400", "chained"/"fixed").
std::vector<SweepRow> run_sweep(const Vocabulary& vocab, const std::vector<EvalTask>& tasks, const EmbedConfig& base,
                                SweepKnob knob, const std::vector<std::string>& values);

inline const std::vector<std::string> kGammaGrid = {"0.25", "0.375", "0.5", "0.625", "0.75"};
inline const std::vector<std::string> kMaxTokensGrid = {"200", "300", "400", "500", "600"};
inline const std::vector<std::string> kHashModes = {"chained", "fixed"};

void write_sweep_tsv(std::ostream& out, SweepKnob knob, const std::vector<SweepRow>& rows);
void write_survival_tsv(std::ostream& out, const SurvivalMatrix& matrix);

}  // namespace codemark
