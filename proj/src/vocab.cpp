#include "codemark/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "codemark/error.hpp"

namespace codemark {

std::string escape_token_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

bool unescape_token_text(std::string_view escaped, std::string& out) {
  out.clear();
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (++i == escaped.size()) return false;
    switch (escaped[i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      default: return false;
    }
  }
  return true;
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> texts;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("#!")) continue;

    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw LoadError(line_no, "expected <id><TAB><text>");
    const std::string_view id_field(line.data(), tab);
    TokenId id = 0;
    const auto [ptr, ec] = std::from_chars(id_field.data(), id_field.data() + id_field.size(), id);
    if (ec != std::errc{} || ptr != id_field.data() + id_field.size() || id_field.empty()) {
      throw LoadError(line_no, "malformed id '" + std::string(id_field) + "'");
    }
    if (id < texts.size()) throw LoadError(line_no, "duplicate id " + std::to_string(id));
    if (id != texts.size()) {
      throw LoadError(line_no, "non-contiguous id " + std::to_string(id) + ", expected " +
                                   std::to_string(texts.size()));
    }
    std::string text;
    if (!unescape_token_text(std::string_view(line).substr(tab + 1), text)) {
      throw LoadError(line_no, "bad escape in token text");
    }
    if (text.empty()) throw LoadError(line_no, "empty token text");
    texts.push_back(std::move(text));
    lines.push_back(line_no);
  }

  auto data = std::make_shared<Data>();
  data->texts = std::move(texts);
  for (TokenId id = 0; id < data->texts.size(); ++id) {
    const std::string_view key = data->texts[id];
    if (!data->index.emplace(key, id).second) {
      throw LoadError(lines[id], "duplicate text '" + escape_token_text(key) + "'");
    }
    data->max_length = std::max(data->max_length, key.size());
  }
  if (data->texts.size() < 2) throw LoadError(line_no, "vocabulary needs at least two entries");
  return Vocabulary(std::move(data));
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file '" + path + "'");
  return load(in);
}

Vocabulary Vocabulary::from_texts(std::vector<std::string> texts) {
  auto data = std::make_shared<Data>();
  data->texts = std::move(texts);
  for (TokenId id = 0; id < data->texts.size(); ++id) {
    const std::string_view key = data->texts[id];
    if (key.empty()) throw LoadError(id + 1, "empty token text");
    if (!data->index.emplace(key, id).second) {
      throw LoadError(id + 1, "duplicate text '" + escape_token_text(key) + "'");
    }
    data->max_length = std::max(data->max_length, key.size());
  }
  if (data->texts.size() < 2) throw LoadError(0, "vocabulary needs at least two entries");
  return Vocabulary(std::move(data));
}

long Vocabulary::find(std::string_view text) const {
  const auto it = data_->index.find(text);
  return it == data_->index.end() ? -1 : static_cast<long>(it->second);
}

long Vocabulary::longest_match(std::string_view rest) const {
  for (std::size_t len = std::min(rest.size(), data_->max_length); len > 0; --len) {
    const auto it = data_->index.find(rest.substr(0, len));
    if (it != data_->index.end()) return it->second;
  }
  return -1;
}

std::vector<TokenId> Vocabulary::tokenize(std::string_view code) const {
  std::vector<TokenId> out;
  std::size_t pos = 0;
  while (pos < code.size()) {
    const long id = longest_match(code.substr(pos));
    if (id < 0) throw TokenizeError(pos);
    out.push_back(static_cast<TokenId>(id));
    pos += data_->texts[id].size();
  }
  return out;
}

std::string Vocabulary::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += data_->texts.at(id);
  return out;
}

bool Vocabulary::extends_canonically(std::span<const TokenId> tokens, std::string_view text,
                                     TokenId next) const {
  // A token starting at s with s + max_length <= |text| never looked past the
  // old end, so only the tail from the first token after that point can change.
  const std::size_t old_len = text.size();
  const std::size_t reach = data_->max_length;
  std::size_t first = tokens.size();
  std::size_t start = old_len;
  while (first > 0) {
    const std::size_t len = data_->texts[tokens[first - 1]].size();
    if (start - len + reach <= old_len) break;
    start -= len;
    --first;
  }

  std::string tail(text.substr(start));
  tail += data_->texts.at(next);
  std::size_t pos = 0;
  std::size_t k = first;
  const std::string_view view(tail);
  while (pos < view.size()) {
    const long id = longest_match(view.substr(pos));
    if (id < 0) return false;
    const TokenId expected = k < tokens.size() ? tokens[k] : next;
    if (k > tokens.size() || static_cast<TokenId>(id) != expected) return false;
    pos += data_->texts[id].size();
    ++k;
  }
  return k == tokens.size() + 1;
}

void Vocabulary::save(std::ostream& out) const {
  for (TokenId id = 0; id < data_->texts.size(); ++id) {
    out << id << '\t' << escape_token_text(data_->texts[id]) << '\n';
  }
}

}  // namespace codemark
