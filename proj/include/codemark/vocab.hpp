#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codemark/hash.hpp"

namespace codemark {

// Ordered token table standing in for a model vocabulary. Immutable once
// built; copies share the underlying table.
class Vocabulary {
 public:
  // Throws LoadError on duplicate ids or texts, gaps in the id sequence,
  // empty token text, bad escapes, or fewer than two entries.
  static Vocabulary load(std::istream& in);
  static Vocabulary load_file(const std::string& path);
  static Vocabulary from_texts(std::vector<std::string> texts);

  std::size_t size() const noexcept { return data_->texts.size(); }
  std::size_t max_token_length() const noexcept { return data_->max_length; }
  std::string_view text(TokenId id) const { return data_->texts.at(id); }
  const std::vector<std::string>& texts() const noexcept { return data_->texts; }

  // Id of the entry with exactly this text, or -1.
  long find(std::string_view text) const;

  // Greedy leftmost-longest segmentation. Throws TokenizeError carrying the
  // byte offset where no entry matches.
  std::vector<TokenId> tokenize(std::string_view code) const;

  // Longest entry matching a prefix of `rest`, or -1.
  long longest_match(std::string_view rest) const;

  std::string detokenize(std::span<const TokenId> ids) const;

  // True iff `tokens` followed by `next` is still exactly what tokenize()
  // returns for the concatenated text, given that `tokens` already is.
  // `text` must equal detokenize(tokens).
  bool extends_canonically(std::span<const TokenId> tokens, std::string_view text, TokenId next) const;

  void save(std::ostream& out) const;

 private:
  struct Data {
    std::vector<std::string> texts;
    std::unordered_map<std::string_view, TokenId> index;
    std::size_t max_length = 0;
  };

  explicit Vocabulary(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  static Vocabulary build(std::vector<std::string> texts, std::size_t first_line);

  std::shared_ptr<const Data> data_;
};

std::string escape_token_text(std::string_view raw);
// Returns false on a dangling or unknown escape.
bool unescape_token_text(std::string_view escaped, std::string& out);

}  // namespace codemark
