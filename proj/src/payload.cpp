#include "codemark/payload.hpp"

#include <algorithm>
#include <charconv>

#include "codemark/error.hpp"

namespace codemark {

Bits encode_user_id(std::uint64_t user_id, std::size_t half_length) {
  if (half_length == 0 || half_length > 64) {
    throw PayloadError("detection half must be 1..64 bits, got " + std::to_string(half_length));
  }
  if (half_length < 64 && user_id >> half_length != 0) {
    throw PayloadError("user id " + std::to_string(user_id) + " does not fit in " +
                       std::to_string(half_length) + " bits");
  }
  Bits out(half_length);
  for (std::size_t i = 0; i < half_length; ++i) {
    out[half_length - 1 - i] = static_cast<std::uint8_t>((user_id >> i) & 1U);
  }
  return out;
}

std::uint64_t decode_user_id(const Bits& bits) {
  if (bits.size() > 64) throw PayloadError("bit vector longer than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1U);
  return v;
}

Bits parse_bits(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw PayloadError("bit string may contain only 0 and 1");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string format_bits(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

Bits recover(const Bits& observed_detection, const Bits& correction) {
  if (observed_detection.size() != correction.size()) {
    throw PayloadError("detection and correction halves differ in length (" +
                       std::to_string(observed_detection.size()) + " vs " +
                       std::to_string(correction.size()) + ")");
  }
  Bits out(observed_detection.size());
  std::transform(observed_detection.begin(), observed_detection.end(), correction.begin(), out.begin(),
                 [](std::uint8_t d, std::uint8_t c) { return static_cast<std::uint8_t>((d ^ (1U & c)) & 1U); });
  return out;
}

WatermarkPayload::WatermarkPayload(Bits detection_bits, Bits correction_bits)
    : detection_(std::move(detection_bits)), correction_(std::move(correction_bits)) {
  if (detection_.empty()) throw PayloadError("watermark length must be at least 2");
  if (detection_.size() != correction_.size()) {
    throw PayloadError("detection and correction halves must have equal length");
  }
}

WatermarkPayload WatermarkPayload::for_user(std::uint64_t user_id, std::size_t total_length) {
  if (total_length < 2 || total_length % 2 != 0) {
    throw PayloadError("watermark length must be even and >= 2, got " + std::to_string(total_length));
  }
  const std::size_t half = total_length / 2;
  return WatermarkPayload(encode_user_id(user_id, half), Bits(half, 0));
}

WatermarkPayload WatermarkPayload::parse(std::string_view spec, std::size_t total_length) {
  if (total_length < 2 || total_length % 2 != 0) {
    throw PayloadError("watermark length must be even and >= 2, got " + std::to_string(total_length));
  }
  const std::size_t half = total_length / 2;
  // A string of exactly X/2 binary digits is a bit string; anything else is a
  // decimal id.
  const bool binary = spec.size() == half && std::all_of(spec.begin(), spec.end(), [](char c) {
                        return c == '0' || c == '1';
                      });
  if (binary) return WatermarkPayload(parse_bits(spec), Bits(half, 0));

  std::uint64_t id = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), id);
  if (spec.empty() || ec != std::errc{} || ptr != spec.data() + spec.size()) {
    throw PayloadError("payload must be a decimal user id or a " + std::to_string(half) +
                       "-bit string, got '" + std::string(spec) + "'");
  }
  return for_user(id, total_length);
}

}  // namespace codemark
