#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "codemark/attacks.hpp"
#include "codemark/detector.hpp"
#include "codemark/embedder.hpp"
#include "codemark/error.hpp"
#include "codemark/payload.hpp"
#include "codemark/provider.hpp"
#include "codemark/serve.hpp"

namespace py = pybind11;
using namespace codemark;

namespace {

// Host-side model: a Python callable mapping the generated ids to a
// probability list, or None to end the sequence.
class CallbackProvider final : public TokenDistributionProvider {
 public:
  explicit CallbackProvider(py::function fn) : fn_(std::move(fn)) {}
  NextToken next(std::span<const TokenId>, std::span<const TokenId> generated) override {
    py::object r = fn_(std::vector<TokenId>(generated.begin(), generated.end()));
    if (r.is_none()) return {{}, true};
    return {r.cast<std::vector<double>>(), false};
  }

 private:
  py::function fn_;
};

py::dict result_dict(const EmbedResult& r) {
  py::dict d;
  d["status"] = to_string(r.status);
  d["code"] = r.code;
  d["tokens"] = r.tokens;
  d["rounds"] = r.trace.summary.rounds;
  d["bits"] = r.trace.summary.bits;
  return d;
}

py::dict detection_dict(const DetectionResult& r) {
  py::dict d;
  d["detected"] = r.detected;
  d["user_bits"] = format_bits(r.user_bits);
  d["user_id"] = r.detected ? py::object(py::int_(decode_user_id(r.user_bits))) : py::object(py::none());
  d["rounds_used"] = r.rounds_used;
  d["reason"] = r.reason ? py::object(py::str(to_string(*r.reason))) : py::object(py::none());
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_codemark, m) {
  m.doc() = "Structure-aware code watermarking core";

  static py::exception<Error> base(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_static("load", &Vocabulary::load_file, py::arg("path"))
      .def_static("from_texts", &Vocabulary::from_texts, py::arg("texts"))
      .def("__len__", &Vocabulary::size)
      .def("text", [](const Vocabulary& v, TokenId id) { return std::string(v.text(id)); })
      .def("find", [](const Vocabulary& v, const std::string& t) {
        const long id = v.find(t);
        return id < 0 ? py::object(py::none()) : py::object(py::int_(id));
      })
      .def("tokenize", &Vocabulary::tokenize, py::arg("code"))
      .def("detokenize", [](const Vocabulary& v, const std::vector<TokenId>& ids) { return v.detokenize(ids); });

  py::class_<EmbedConfig>(m, "EmbedConfig")
      .def(py::init<>())
      .def_readwrite("max_new_tokens", &EmbedConfig::max_new_tokens)
      .def_readwrite("gamma", &EmbedConfig::gamma)
      .def_readwrite("watermark_length", &EmbedConfig::watermark_length)
      .def_readwrite("outlier_scale", &EmbedConfig::outlier_scale)
      .def_readwrite("seed", &EmbedConfig::seed)
      .def_readwrite("start_on_newline", &EmbedConfig::start_on_newline)
      .def_readwrite("watermark", &EmbedConfig::watermark)
      .def_readwrite("canonical_tokens", &EmbedConfig::canonical_tokens)
      .def_property(
          "hash_mode", [](const EmbedConfig& c) { return std::string(to_string(c.hash_mode)); },
          [](EmbedConfig& c, const std::string& s) { c.hash_mode = parse_hash_mode(s); })
      .def("validate", [](const EmbedConfig& c, std::size_t n) { c.validate(n); }, py::arg("vocab_size") = 0);

  m.def(
      "embed",
      [](const Vocabulary& vocab, std::string payload, const EmbedConfig& config, py::function next) {
        CallbackProvider provider(std::move(next));
        return result_dict(embed({}, WatermarkPayload::parse(payload, config.watermark_length), provider, vocab, config));
      },
      py::arg("vocab"), py::arg("payload"), py::arg("config"), py::arg("next"),
      "Embed with a Python callable as the model: next(generated_ids) -> probs or None.");

  m.def(
      "embed_mock",
      [](const Vocabulary& vocab, std::string payload, const EmbedConfig& config, const std::string& kind,
         std::uint64_t provider_seed, const std::string& template_code, const std::vector<TokenId>& script) {
        ProviderSpec spec;
        spec.kind = parse_provider_kind(kind);
        spec.seed = provider_seed;
        spec.template_code = template_code;
        spec.script = script;
        auto provider = make_mock_provider(vocab, spec);
        return result_dict(embed({}, WatermarkPayload::parse(payload, config.watermark_length), *provider, vocab, config));
      },
      py::arg("vocab"), py::arg("payload"), py::arg("config"), py::arg("kind") = "seeded-random",
      py::arg("provider_seed") = 1, py::arg("template_code") = "", py::arg("script") = std::vector<TokenId>{});

  m.def(
      "detect",
      [](const std::string& code, const Vocabulary& vocab, const EmbedConfig& config) {
        return detection_dict(detect(code, vocab, config));
      },
      py::arg("code"), py::arg("vocab"), py::arg("config"));

  m.def(
      "attack",
      [](const std::string& code, const std::string& kind, std::uint64_t seed) {
        const auto out = apply_attack(code, parse_attack_kind(kind), seed);
        return py::make_tuple(out.code, out.noop);
      },
      py::arg("code"), py::arg("kind"), py::arg("seed") = 0);

  m.def("encode_user_id", [](std::uint64_t id, std::size_t half) { return format_bits(encode_user_id(id, half)); },
        py::arg("user_id"), py::arg("half_length") = 12);

  py::class_<ProtocolServer>(m, "ProtocolServer")
      .def(py::init<Vocabulary, EmbedConfig>(), py::arg("vocab"), py::arg("defaults") = EmbedConfig{})
      .def("handle", &ProtocolServer::handle, py::arg("line"))
      .def_property_readonly("in_session", &ProtocolServer::in_session);

  m.attr("PROTOCOL_VERSION") = kProtocolVersion;
}
