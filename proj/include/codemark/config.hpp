#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "codemark/skipper.hpp"

namespace codemark {

enum class HashMode : std::uint8_t {
  chained,  // H is re-mixed with every bit-carrying token
  fixed,    // H stays at the seed for the whole session
};

const char* to_string(HashMode mode);
HashMode parse_hash_mode(const std::string& text);

// Settings shared by the embedder and the detector; detection must use the
// values that were in force at embed time.
struct EmbedConfig {
  std::size_t max_new_tokens = 400;
  double gamma = 0.5;
  std::size_t watermark_length = 24;
  double outlier_scale = 1.5;
  // Accepted for compatibility with outlier-threshold configs; not used by
  // the outlier rule.
  double thr_p_dis = 0.0;
  std::uint64_t seed = 0x2545F4914F6CDD1DULL;
  bool start_on_newline = true;
  HashMode hash_mode = HashMode::chained;
  bool watermark = true;
  // Restrict every pick to tokens that keep the generated text's greedy
  // tokenization identical to the emitted token sequence.
  bool canonical_tokens = true;
  PatternSets patterns = PatternSets::python();

  // Throws ConfigError. vocab_size == 0 skips the vocabulary-dependent checks.
  void validate(std::size_t vocab_size = 0) const;
};

}  // namespace codemark
