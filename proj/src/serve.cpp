#include "codemark/serve.hpp"

#include <algorithm>

#include "codemark/error.hpp"
#include "codemark/payload.hpp"
#include "trace_json.hpp"

namespace codemark {

namespace {

using nlohmann::json;

// Error carrying a protocol error code.
struct ProtocolError : Error {
  ProtocolError(std::string c, const std::string& what) : Error(what), code(std::move(c)) {}
  std::string code;
};

std::string error_line(const std::string& code, const std::string& message) {
  return json{{"type", "error"}, {"version", kProtocolVersion}, {"code", code}, {"message", message}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

const json& req(const void* p) { return *static_cast<const json*>(p); }

template <class T>
std::optional<T> field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError("malformed", std::string("field '") + name + "' has the wrong type");
  }
}

std::uint64_t seed_field(const json& j) {
  const auto it = j.find("seed");
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ProtocolError("malformed", "field 'seed' must be an unsigned integer or a numeric string");
}

}  // namespace

ProtocolServer::ProtocolServer(Vocabulary vocab, EmbedConfig defaults)
    : vocab_(std::move(vocab)), defaults_(std::move(defaults)) {}

std::string ProtocolServer::handle(std::string_view line) {
  try {
    const json request = json::parse(line);
    if (!request.is_object()) throw ProtocolError("malformed", "request must be a JSON object");
    const auto type = field<std::string>(request, "type");
    if (!type) throw ProtocolError("malformed", "request has no 'type'");
    if (const auto v = field<int>(request, "version"); v && *v != kProtocolVersion) {
      throw ProtocolError("version-mismatch",
                          "protocol version " + std::to_string(*v) + " requested, core speaks " +
                              std::to_string(kProtocolVersion));
    }
    if (*type == "hello") return hello(&request);
    if (*type == "step") return step(&request);
    if (*type == "finish") return finish(&request);
    throw ProtocolError("malformed", "unknown request type '" + *type + "'");
  } catch (const ProtocolError& e) {
    return error_line(e.code, e.what());
  } catch (const json::exception& e) {
    return error_line("malformed", e.what());
  } catch (const ConfigError& e) {
    return error_line("bad-config", e.what());
  } catch (const PayloadError& e) {
    return error_line("bad-config", e.what());
  } catch (const SessionError& e) {
    return error_line("bad-step", e.what());
  } catch (const std::exception& e) {
    return error_line("internal", e.what());
  } catch (...) {
    return error_line("internal", "unknown failure");
  }
}

std::string ProtocolServer::hello(const void* p) {
  const json& r = req(p);
  const auto version = field<int>(r, "version");
  if (!version) throw ProtocolError("version-mismatch", "hello must carry a protocol version");
  if (session_) throw ProtocolError("session-active", "finish the current session before a new hello");
  const auto vocab_size = field<std::size_t>(r, "vocab_size");
  if (!vocab_size) throw ProtocolError("malformed", "hello must carry vocab_size");
  if (*vocab_size != vocab_.size()) {
    throw ProtocolError("vocab-size-mismatch", "host vocabulary has " + std::to_string(*vocab_size) +
                                                   " entries, core vocabulary has " + std::to_string(vocab_.size()));
  }
  EmbedConfig c = defaults_;
  if (auto v = field<std::size_t>(r, "watermark_length")) c.watermark_length = *v;
  if (auto v = field<double>(r, "gamma")) c.gamma = *v;
  if (auto v = field<double>(r, "outlier_scale")) c.outlier_scale = *v;
  if (auto v = field<std::size_t>(r, "max_new_tokens")) c.max_new_tokens = *v;
  if (auto v = field<bool>(r, "start_on_newline")) c.start_on_newline = *v;
  if (auto v = field<bool>(r, "canonical_tokens")) c.canonical_tokens = *v;
  if (auto v = field<std::string>(r, "hash_mode")) c.hash_mode = parse_hash_mode(*v);
  if (r.contains("seed") && !r["seed"].is_null()) c.seed = seed_field(r);
  c.validate(vocab_.size());

  const auto it = r.find("payload");
  if (it == r.end()) throw ProtocolError("malformed", "hello must carry a payload");
  std::string spec;
  if (it->is_number_unsigned()) spec = std::to_string(it->get<std::uint64_t>());
  else if (it->is_string()) spec = it->get<std::string>();
  else throw ProtocolError("malformed", "payload must be a user id or a bit string");

  session_.emplace(vocab_, WatermarkPayload::parse(spec, c.watermark_length), c);
  want_trace_ = field<bool>(r, "trace").value_or(false);
  session_id_ = next_session_++;
  return json{{"type", "hello-ack"}, {"version", kProtocolVersion}, {"session", session_id_}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void ProtocolServer::commit_last(const void* p, bool required) {
  const json& r = req(p);
  const auto id = field<std::int64_t>(r, "last_token_id");
  if (!session_->pending()) return;  // first step: the prompt's last token is not ours to commit
  if (!id) {
    if (required) throw ProtocolError("bad-step", "last_token_id is required after the first step");
    return;
  }
  if (*id < 0 || static_cast<std::uint64_t>(*id) >= vocab_.size()) {
    throw ProtocolError("bad-step", "last_token_id " + std::to_string(*id) + " outside the vocabulary");
  }
  const auto token = static_cast<TokenId>(*id);
  if (const auto text = field<std::string>(r, "last_token_text"); text && *text != vocab_.text(token)) {
    throw ProtocolError("token-mismatch", "last_token_text does not match the text of token " + std::to_string(*id));
  }
  session_->commit(token);
}

std::string ProtocolServer::step(const void* p) {
  const json& r = req(p);
  if (!session_) throw ProtocolError("no-session", "step before hello");
  const std::size_t n = vocab_.size();

  std::vector<double> probs;
  std::vector<TokenId> listed;
  const bool sparse = r.contains("sparse");
  if (sparse) {
    const auto max = field<double>(r, "max");
    const auto min = field<double>(r, "min");
    if (!max || !min) throw ProtocolError("malformed", "sparse steps must carry the global max and min");
    if (*min < 0 || *max < *min) throw ProtocolError("bad-step", "need 0 <= min <= max");
    probs.assign(n, *min);
    const auto& pairs = r["sparse"];
    if (!pairs.is_array() || pairs.empty()) throw ProtocolError("malformed", "sparse must be a non-empty array");
    for (const auto& e : pairs) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
        throw ProtocolError("malformed", "sparse entries must be [id, probability]");
      }
      const auto id = e[0].get<std::int64_t>();
      const double v = e[1].get<double>();
      if (id < 0 || static_cast<std::uint64_t>(id) >= n) throw ProtocolError("bad-step", "sparse id out of range");
      if (v < *min || v > *max) throw ProtocolError("bad-step", "sparse probability outside [min, max]");
      probs[static_cast<std::size_t>(id)] = v;
      listed.push_back(static_cast<TokenId>(id));
    }
  } else {
    const auto dense = field<std::vector<double>>(r, "probs");
    if (!dense) throw ProtocolError("malformed", "step needs 'probs' or 'sparse'");
    if (dense->size() != n) {
      throw ProtocolError("vocab-size-mismatch", "step has " + std::to_string(dense->size()) +
                                                     " probabilities, vocabulary has " + std::to_string(n));
    }
    if (std::any_of(dense->begin(), dense->end(), [](double v) { return !(v >= 0.0); })) {
      throw ProtocolError("bad-step", "probabilities must be non-negative numbers");
    }
    probs = *dense;
  }

  commit_last(p, true);
  if (session_->exhausted()) throw ProtocolError("exhausted", "session reached max_new_tokens; send finish");
  const auto& plan = session_->plan(probs);

  json ack{{"type", "step-ack"},
           {"version", kProtocolVersion},
           {"step", session_->generated().size()},
           {"token", plan.token},
           {"decision", plan.phase == StepPhase::active ? to_string(plan.decision.kind) : phase_name(plan.phase)},
           {"pattern", static_cast<int>(plan.decision.reason)},
           {"rollback", plan.decision.rollback},
           {"bit_index", plan.carries_bit ? json(plan.bit_index) : json(nullptr)}};
  if (sparse) {
    ack["forced"] = json::array({plan.token});
    if (plan.carries_bit) {
      json biased = json::array();
      for (TokenId id : listed) biased.push_back({id, plan.biased[id]});
      ack["biased"] = std::move(biased);
    } else {
      ack["biased"] = nullptr;
    }
  } else {
    ack["forced"] = nullptr;
    ack["biased"] = plan.carries_bit ? json(plan.biased) : json(nullptr);
  }
  return ack.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string ProtocolServer::finish(const void* p) {
  if (!session_) throw ProtocolError("no-session", "finish before hello");
  commit_last(p, false);
  session_->discard();
  const auto result = session_->finish();
  json ack{{"type", "finish-ack"},
           {"version", kProtocolVersion},
           {"session", session_id_},
           {"status", to_string(result.status)},
           {"rounds", result.trace.summary.rounds},
           {"bits", result.trace.summary.bits},
           {"tokens", result.tokens},
           {"code", result.code},
           {"summary", summary_json(result.trace.summary)}};
  if (want_trace_) {
    json records = json::array();
    for (const auto& rec : result.trace.records) records.push_back(record_json(rec));
    ack["trace"] = std::move(records);
  }
  session_.reset();
  return ack.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void serve(std::istream& in, std::ostream& out, ProtocolServer& server) {
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << server.handle(line) << '\n' << std::flush;
  }
}

}  // namespace codemark
