#include "codemark/config.hpp"

#include "codemark/error.hpp"
#include "codemark/partition.hpp"

namespace codemark {

const char* to_string(HashMode mode) {
  return mode == HashMode::fixed ? "fixed" : "chained";
}

HashMode parse_hash_mode(const std::string& text) {
  if (text == "chained") return HashMode::chained;
  if (text == "fixed") return HashMode::fixed;
  throw ConfigError("hash mode must be 'chained' or 'fixed', got '" + text + "'");
}

void EmbedConfig::validate(std::size_t vocab_size) const {
  if (max_new_tokens < 1) throw ConfigError("max-new-tokens must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie strictly between 0 and 1");
  if (watermark_length < 2 || watermark_length % 2 != 0) {
    throw ConfigError("watermark length must be even and >= 2, got " + std::to_string(watermark_length));
  }
  if (!(outlier_scale > 0.0)) throw ConfigError("outlier-scale must be positive");
  if (vocab_size > 0) {
    if (vocab_size < 2) throw ConfigError("vocabulary needs at least two entries");
    const std::size_t k = selected_size(vocab_size, gamma);
    if (k == 0 || k >= vocab_size) {
      throw ConfigError("gamma " + std::to_string(gamma) + " leaves one side of a " +
                        std::to_string(vocab_size) + "-token partition empty");
    }
  }
}

}  // namespace codemark
