#include "codemark/config_file.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "codemark/error.hpp"

namespace codemark {

namespace {

std::vector<std::string> words(const std::string& value) {
  std::istringstream in(value);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  try {
    return static_cast<std::size_t>(parse_u64(text));
  } catch (const ConfigError&) {
    throw ConfigError(key + ": not a non-negative integer: '" + text + "'");
  }
}

std::string resolve(const std::string& base, const std::string& path) {
  if (base.empty() || path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

}  // namespace

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  std::string_view s = text;
  int base = 10;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    base = 16;
  }
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v, base);
  if (s.empty() || ec != std::errc() || p != end) throw ConfigError("not an unsigned integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

void set_config_key(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  EmbedConfig& e = c.embed;
  const std::string where = section + "." + key;
  if (section == "run") {
    if (key == "vocab") c.vocab_path = value;
    else if (key == "payload" || key == "user") c.payload = value;
    else if (key == "provider") c.provider.kind = parse_provider_kind(value);
    else if (key == "provider-seed") c.provider.seed = parse_u64(value);
    else if (key == "template") c.template_path = value;
    else if (key == "outlier-rate") c.provider.outlier_rate = parse_double(where, value);
    else if (key == "provider-length") c.provider.max_length = parse_size(where, value);
    else if (key == "script") {
      c.provider.script.clear();
      for (const auto& w : words(value)) c.provider.script.push_back(static_cast<TokenId>(parse_size(where, w)));
    } else if (key == "code-out") c.code_out = value;
    else if (key == "trace-out") c.trace_out = value;
    else if (key == "report-out") c.report_out = value;
    else throw ConfigError("unknown key " + where);
  } else if (section == "embed") {
    if (key == "max-new-tokens") e.max_new_tokens = parse_size(where, value);
    else if (key == "gamma") e.gamma = parse_double(where, value);
    else if (key == "watermark-length") e.watermark_length = parse_size(where, value);
    else if (key == "outlier-scale") e.outlier_scale = parse_double(where, value);
    else if (key == "thr-p-dis") e.thr_p_dis = parse_double(where, value);
    else if (key == "seed") e.seed = parse_u64(value);
    else if (key == "hash-mode") e.hash_mode = parse_hash_mode(value);
    else if (key == "start-on-newline") e.start_on_newline = parse_bool(value);
    else if (key == "canonical-tokens") e.canonical_tokens = parse_bool(value);
    else if (key == "watermark") e.watermark = parse_bool(value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "patterns") {
    PatternSets& p = e.patterns;
    if (key == "keywords") p.keywords = words(value);
    else if (key == "symbols") p.symbols = words(value);
    else if (key == "delimiters") p.delimiters = words(value);
    else if (key == "brackets") {
      // Each item is an opener immediately followed by its closer of equal length.
      p.brackets.clear();
      for (const auto& w : words(value)) {
        if (w.size() % 2 != 0) throw ConfigError(where + ": '" + w + "' is not an opener/closer pair");
        p.brackets.emplace_back(w.substr(0, w.size() / 2), w.substr(w.size() / 2));
      }
    } else {
      throw ConfigError("unknown key " + where);
    }
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

void read_run_config(std::istream& in, RunConfig& config, const std::string& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, node] : body) set_config_key(config, section, key, node.get_value<std::string>());
  }
  config.vocab_path = resolve(base_dir, config.vocab_path);
  config.template_path = resolve(base_dir, config.template_path);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig c;
  read_run_config(in, c, std::filesystem::path(path).parent_path().string());
  return c;
}

}  // namespace codemark
