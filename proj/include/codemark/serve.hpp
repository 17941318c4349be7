#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "codemark/config.hpp"
#include "codemark/embedder.hpp"
#include "codemark/vocab.hpp"

namespace codemark {

inline constexpr int kProtocolVersion = 1;

// Line-delimited JSON protocol that lets a host own the model while the core
// owns every watermark decision. One request line in, one response line out;
// handle() never throws.
//
//   hello   {type, version, vocab_size, payload, [watermark_length, gamma, seed,
//            hash_mode, outlier_scale, max_new_tokens, start_on_newline,
//            canonical_tokens, trace]}
//   step    {type, probs | (sparse [[id, p], ...], max, min),
//            [last_token_id, last_token_text]}
//   finish  {type, [last_token_id, last_token_text]}
//
// last_token_* names the token the host emitted for the previous step; the
// core commits it before planning the next one.
class ProtocolServer {
 public:
  ProtocolServer(Vocabulary vocab, EmbedConfig defaults);

  std::string handle(std::string_view line);
  bool in_session() const noexcept { return session_.has_value(); }

 private:
  std::string hello(const void* request);
  std::string step(const void* request);
  std::string finish(const void* request);
  void commit_last(const void* request, bool required);

  Vocabulary vocab_;
  EmbedConfig defaults_;
  std::optional<EmbedSession> session_;
  bool want_trace_ = false;
  std::uint64_t next_session_ = 1;
  std::uint64_t session_id_ = 0;
};

// Reads requests until end of input, writing and flushing one response per
// non-empty line.
void serve(std::istream& in, std::ostream& out, ProtocolServer& server);

}  // namespace codemark
