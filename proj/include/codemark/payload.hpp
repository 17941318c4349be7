#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codemark {

// One bit per element, values 0 or 1, most-significant first.
using Bits = std::vector<std::uint8_t>;

Bits encode_user_id(std::uint64_t user_id, std::size_t half_length);
std::uint64_t decode_user_id(const Bits& bits);

// Parses a string of '0'/'1' characters.
Bits parse_bits(std::string_view text);
std::string format_bits(const Bits& bits);

// Detection bits XOR correction bits: a correction bit of 1 flips the
// observed detection bit at that index.
Bits recover(const Bits& observed_detection, const Bits& correction);

// X-bit watermark: X/2 detection bits carrying the user id, then X/2
// error-correction bits that are filled in per round at embed time.
class WatermarkPayload {
 public:
  WatermarkPayload(Bits detection_bits, Bits correction_bits);

  static WatermarkPayload for_user(std::uint64_t user_id, std::size_t total_length = 24);
  // Accepts either a decimal user id or an explicit bit string of length X/2.
  static WatermarkPayload parse(std::string_view spec, std::size_t total_length = 24);

  std::size_t total_length() const noexcept { return 2 * detection_.size(); }
  std::size_t half_length() const noexcept { return detection_.size(); }
  const Bits& detection_bits() const noexcept { return detection_; }
  const Bits& correction_bits() const noexcept { return correction_; }

 private:
  Bits detection_;
  Bits correction_;
};

}  // namespace codemark
