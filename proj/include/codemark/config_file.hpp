#pragma once

#include <istream>
#include <string>

#include "codemark/config.hpp"
#include "codemark/provider.hpp"

namespace codemark {

// Everything a CLI run needs. Missing keys keep the EmbedConfig defaults.
struct RunConfig {
  std::string vocab_path;
  std::string payload = "0";  // decimal user id or an X/2-digit bit string
  ProviderSpec provider;
  std::string template_path;
  EmbedConfig embed;
  std::string code_out;
  std::string trace_out;
  std::string report_out;
};

// INI-style file: [run], [embed] and [patterns] sections of key = value
// lines. Unknown sections or keys are rejected. Relative paths are resolved
// against the file's directory.
void read_run_config(std::istream& in, RunConfig& config, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

// Applies a single key from any section; used by CLI overrides as well.
void set_config_key(RunConfig& config, const std::string& section, const std::string& key, const std::string& value);

std::uint64_t parse_u64(const std::string& text);
bool parse_bool(const std::string& text);

}  // namespace codemark
