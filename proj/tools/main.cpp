// codemark: embed, detect, attack and evaluate code watermarks.
//
// Exit codes: 0 success (watermark embedded/detected), 1 negative outcome,
// 2 input or configuration error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "codemark/attacks.hpp"
#include "codemark/config_file.hpp"
#include "codemark/detector.hpp"
#include "codemark/embedder.hpp"
#include "codemark/error.hpp"
#include "codemark/eval.hpp"
#include "codemark/serve.hpp"

using namespace codemark;

namespace {

struct Common {
  std::string config_path;
  std::string vocab;
  std::vector<std::string> sets;  // section.key=value
  std::optional<double> gamma;
  std::optional<std::size_t> length;
  std::optional<double> scale;
  std::optional<double> thr;
  std::optional<std::string> seed;
  std::optional<std::string> hash_mode;
  std::optional<std::size_t> max_tokens;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "INI run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--vocab", c.vocab, "vocabulary file (id<TAB>text)");
  cmd->add_option("--gamma", c.gamma, "selected fraction of the vocabulary");
  cmd->add_option("--watermark-length", c.length, "total watermark bits X");
  cmd->add_option("--outlier-scale", c.scale, "whisker scale S");
  cmd->add_option("--thr-p-dis", c.thr, "accepted for compatibility; unused");
  cmd->add_option("--seed", c.seed, "initial hash H0 (decimal or 0x hex)");
  cmd->add_option("--hash-mode", c.hash_mode, "chained or fixed");
  cmd->add_option("--max-new-tokens", c.max_tokens, "generation limit L");
  cmd->add_option("--set", c.sets, "override any config key: section.key=value");
}

RunConfig resolve(const Common& c) {
  RunConfig rc = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
  if (!c.vocab.empty()) rc.vocab_path = c.vocab;
  for (const auto& s : c.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      throw ConfigError("--set expects section.key=value, got '" + s + "'");
    }
    set_config_key(rc, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
  }
  EmbedConfig& e = rc.embed;
  if (c.gamma) e.gamma = *c.gamma;
  if (c.length) e.watermark_length = *c.length;
  if (c.scale) e.outlier_scale = *c.scale;
  if (c.thr) e.thr_p_dis = *c.thr;
  if (c.seed) e.seed = parse_u64(*c.seed);
  if (c.hash_mode) e.hash_mode = parse_hash_mode(*c.hash_mode);
  if (c.max_tokens) e.max_new_tokens = *c.max_tokens;
  return rc;
}

Vocabulary load_vocab(const RunConfig& rc) {
  if (rc.vocab_path.empty()) throw ConfigError("no vocabulary given (use --vocab or [run] vocab)");
  return Vocabulary::load_file(rc.vocab_path);
}

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file(const std::string& path) {
  if (path == "-") return read_all(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return read_all(in);
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << data;
}

std::vector<std::string> load_templates(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(read_file(f.string()));
  if (out.empty()) throw ConfigError("no .py templates in " + dir);
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_embed(const Common& common, const std::string& out_path, const std::string& trace_path,
              const std::optional<std::string>& payload, const std::optional<std::string>& provider,
              const std::optional<std::uint64_t>& provider_seed, const std::optional<std::string>& template_path,
              const std::string& prompt) {
  RunConfig rc = resolve(common);
  if (payload) rc.payload = *payload;
  if (provider) rc.provider.kind = parse_provider_kind(*provider);
  if (provider_seed) rc.provider.seed = *provider_seed;
  if (template_path) rc.template_path = *template_path;
  const std::string code_out = out_path.empty() ? rc.code_out : out_path;
  const std::string trace_out = trace_path.empty() ? rc.trace_out : trace_path;

  const Vocabulary vocab = load_vocab(rc);
  rc.embed.validate(vocab.size());
  if (rc.provider.kind == ProviderKind::code_template) {
    if (rc.template_path.empty()) throw ConfigError("code-template provider needs --template");
    rc.provider.template_code = read_file(rc.template_path);
  }
  const auto wm = WatermarkPayload::parse(rc.payload, rc.embed.watermark_length);
  auto source = make_mock_provider(vocab, rc.provider);
  const auto prompt_ids = vocab.tokenize(prompt);
  const auto result = embed(prompt_ids, wm, *source, vocab, rc.embed);

  if (code_out.empty() || code_out == "-") {
    std::cout << result.code;
    if (!result.code.empty() && result.code.back() != '\n') std::cout << '\n';
  } else {
    write_file(code_out, result.code);
  }
  if (!trace_out.empty()) {
    std::ofstream t(trace_out);
    if (!t) throw ConfigError("cannot write " + trace_out);
    write_trace_jsonl(t, result.trace);
  }
  const auto& s = result.trace.summary;
  std::cerr << "status " << to_string(result.status) << " rounds " << s.rounds << " bits " << s.bits << " tokens "
            << s.steps << '\n';
  return result.status == EmbedStatus::complete ? 0 : 1;
}

int cmd_detect(const Common& common, const std::string& path, const std::string& report, bool json_out) {
  const RunConfig rc = resolve(common);
  const Vocabulary vocab = load_vocab(rc);
  rc.embed.validate(vocab.size());
  const std::string code = read_file(path);
  const auto r = detect(code, vocab, rc.embed);

  std::ostringstream verdict;
  if (r.detected) {
    verdict << "detected user " << decode_user_id(r.user_bits) << " bits " << format_bits(r.user_bits)
            << " rounds " << r.rounds_used;
  } else {
    verdict << "not detected: " << to_string(*r.reason) << " (" << r.message << ")";
  }
  const std::string report_path = report.empty() ? rc.report_out : report;
  if (json_out || !report_path.empty()) {
    std::ostringstream j;
    j << "{\"detected\": " << (r.detected ? "true" : "false");
    if (r.detected) j << ", \"user\": " << decode_user_id(r.user_bits) << ", \"bits\": \"" << format_bits(r.user_bits) << '"';
    if (r.reason) j << ", \"reason\": \"" << to_string(*r.reason) << '"';
    j << ", \"rounds\": [";
    for (std::size_t i = 0; i < r.recovered.size(); ++i) j << (i ? ", " : "") << '"' << format_bits(r.recovered[i]) << '"';
    j << "], \"trailing_bits\": " << r.extraction.trailing.size() << "}\n";
    if (json_out) std::cout << j.str();
    if (!report_path.empty()) write_file(report_path, j.str());
  }
  std::cout << verdict.str() << '\n';
  return r.detected ? 0 : 1;
}

int cmd_attack(const std::string& kind, std::uint64_t seed, std::size_t intensity, const std::string& mode) {
  AttackOptions o;
  o.intensity = intensity;
  if (mode == "modify") o.mode = AttackOptions::Mode::modify;
  else if (mode == "remove") o.mode = AttackOptions::Mode::remove;
  else if (mode != "either") throw ConfigError("--mode must be either, modify or remove");
  const auto r = apply_attack(read_all(std::cin), parse_attack_kind(kind), seed, o);
  std::cout << r.code;
  std::cerr << (r.noop ? "no-op: " : "applied: ") << r.note << '\n';
  return 0;
}

int cmd_eval(const Common& common, const std::string& sweep, const std::string& values, std::size_t tasks,
             const std::string& templates_dir, const std::string& provider, std::uint64_t eval_seed,
             std::size_t trials, const std::string& out_path) {
  if (sweep.find(',') != std::string::npos) {
    throw ConfigError("eval varies one knob at a time; got '" + sweep + "'");
  }
  const RunConfig rc = resolve(common);
  const Vocabulary vocab = load_vocab(rc);
  rc.embed.validate(vocab.size());
  const auto kind = parse_provider_kind(provider);
  std::vector<std::string> templates;
  if (kind == ProviderKind::code_template) templates = load_templates(templates_dir);
  const auto task_list = make_tasks(tasks, templates, eval_seed, rc.embed.watermark_length, kind);

  std::ostringstream table;
  if (sweep == "robustness") {
    std::vector<Sample> samples;
    for (const auto& t : task_list) {
      auto o = run_task(vocab, t, rc.embed);
      if (o.detected) samples.push_back({std::move(o.code), std::move(o.expected)});
    }
    const std::vector<AttackKind> kinds(std::begin(kAllAttacks), std::end(kAllAttacks));
    write_survival_tsv(table, robustness_eval(samples, kinds, trials, vocab, rc.embed, eval_seed));
  } else {
    const SweepKnob knob = parse_sweep_knob(sweep);
    std::vector<std::string> grid = split_list(values);
    if (grid.empty()) {
      grid = knob == SweepKnob::gamma ? kGammaGrid : knob == SweepKnob::max_tokens ? kMaxTokensGrid : kHashModes;
    }
    write_sweep_tsv(table, knob, run_sweep(vocab, task_list, rc.embed, knob, grid));
  }
  const std::string dest = out_path.empty() ? rc.report_out : out_path;
  if (dest.empty() || dest == "-") std::cout << table.str();
  else write_file(dest, table.str());
  return 0;
}

int cmd_vocab_inspect(const Common& common, const std::string& tokenize_path) {
  const RunConfig rc = resolve(common);
  const Vocabulary vocab = load_vocab(rc);
  std::size_t newline = 0, whitespace = 0;
  for (TokenId id = 0; id < vocab.size(); ++id) {
    newline += vocab.text(id).find('\n') != std::string_view::npos;
    whitespace += Skipper::whitespace_only(vocab.text(id));
  }
  std::cout << "size\t" << vocab.size() << "\nmax_token_length\t" << vocab.max_token_length()
            << "\nnewline_tokens\t" << newline << "\nwhitespace_tokens\t" << whitespace << "\nidentifier_tokens\t"
            << identifier_tokens(vocab).size() << "\nselected_per_step\t"
            << selected_size(vocab.size(), rc.embed.gamma) << '\n';
  if (!tokenize_path.empty()) {
    const auto ids = vocab.tokenize(read_file(tokenize_path));
    for (TokenId id : ids) std::cout << id << '\t' << escape_token_text(vocab.text(id)) << '\n';
  }
  return 0;
}

int cmd_serve(const Common& common) {
  const RunConfig rc = resolve(common);
  ProtocolServer server(load_vocab(rc), rc.embed);
  serve(std::cin, std::cout, server);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codemark: multi-bit code watermarking"};
  app.require_subcommand(1);

  Common common;

  auto* embed_cmd = app.add_subcommand("embed", "generate watermarked code with a mock provider");
  add_common(embed_cmd, common);
  std::string out_path, trace_path, prompt;
  std::optional<std::string> payload, provider, template_path;
  std::optional<std::uint64_t> provider_seed;
  embed_cmd->add_option("--payload,--user", payload, "decimal user id or X/2-digit bit string");
  embed_cmd->add_option("--provider", provider, "seeded-random, scripted or code-template");
  embed_cmd->add_option("--provider-seed", provider_seed, "provider seed");
  embed_cmd->add_option("--template", template_path, "code template for the code-template provider");
  embed_cmd->add_option("--prompt", prompt, "prompt text (tokenized, never watermarked)");
  embed_cmd->add_option("-o,--out", out_path, "code output file (default stdout)");
  embed_cmd->add_option("--trace", trace_path, "per-step trace output (JSON lines)");

  auto* detect_cmd = app.add_subcommand("detect", "recover the user id from code");
  add_common(detect_cmd, common);
  std::string code_path = "-", report_path;
  bool json_out = false;
  detect_cmd->add_option("code", code_path, "code file, or - for stdin");
  detect_cmd->add_option("--report", report_path, "write a JSON report here");
  detect_cmd->add_flag("--json", json_out, "print the JSON report too");

  auto* attack_cmd = app.add_subcommand("attack", "mutate code from stdin");
  std::string attack_kind, attack_mode = "either";
  std::uint64_t attack_seed = 0;
  std::size_t intensity = 1;
  attack_cmd->add_option("--kind", attack_kind, "attack kind")->required();
  attack_cmd->add_option("--seed", attack_seed, "mutation seed");
  attack_cmd->add_option("--intensity", intensity, "targets or insertions per attack");
  attack_cmd->add_option("--mode", attack_mode, "either, modify or remove");

  auto* eval_cmd = app.add_subcommand("eval", "controlled-variable sweeps and robustness matrix");
  add_common(eval_cmd, common);
  std::string sweep, values, templates_dir = std::string(CODEMARK_DATA_DIR) + "/templates", eval_provider = "code-template",
                             eval_out;
  std::size_t tasks = 50, trials = 3;
  std::uint64_t eval_seed = 1;
  eval_cmd->add_option("--sweep", sweep, "gamma, max-new-tokens, hash-mode or robustness")->required();
  eval_cmd->add_option("--values", values, "comma-separated grid (default: the standard grid)");
  eval_cmd->add_option("--tasks", tasks, "mock tasks per grid point");
  eval_cmd->add_option("--templates", templates_dir, "directory of .py templates");
  eval_cmd->add_option("--provider", eval_provider, "code-template or seeded-random");
  eval_cmd->add_option("--eval-seed", eval_seed, "task generation seed");
  eval_cmd->add_option("--trials", trials, "attack trials per sample and kind (robustness)");
  eval_cmd->add_option("-o,--out", eval_out, "table output file (default stdout)");

  auto* vocab_cmd = app.add_subcommand("vocab", "vocabulary utilities");
  auto* inspect_cmd = vocab_cmd->add_subcommand("inspect", "summarize a vocabulary");
  vocab_cmd->require_subcommand(1);
  add_common(inspect_cmd, common);
  std::string tokenize_path;
  inspect_cmd->add_option("--tokenize", tokenize_path, "also print the tokenization of this file");

  auto* serve_cmd = app.add_subcommand("serve", "line-delimited JSON protocol on stdin/stdout");
  add_common(serve_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*embed_cmd) {
      return cmd_embed(common, out_path, trace_path, payload, provider, provider_seed, template_path, prompt);
    }
    if (*detect_cmd) return cmd_detect(common, code_path, report_path, json_out);
    if (*attack_cmd) return cmd_attack(attack_kind, attack_seed, intensity, attack_mode);
    if (*eval_cmd) {
      return cmd_eval(common, sweep, values, tasks, templates_dir, eval_provider, eval_seed, trials, eval_out);
    }
    if (*inspect_cmd) return cmd_vocab_inspect(common, tokenize_path);
    if (*serve_cmd) return cmd_serve(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
