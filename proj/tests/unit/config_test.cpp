#include <gtest/gtest.h>

#include <sstream>

#include "codemark/config.hpp"
#include "codemark/config_file.hpp"
#include "codemark/error.hpp"

using namespace codemark;

namespace {

RunConfig parse(const std::string& text, const std::string& base = "") {
  std::istringstream in(text);
  RunConfig c;
  read_run_config(in, c, base);
  return c;
}

}  // namespace

TEST(Config, Defaults) {
  EmbedConfig c;
  EXPECT_EQ(c.max_new_tokens, 400u);
  EXPECT_EQ(c.gamma, 0.5);
  EXPECT_EQ(c.watermark_length, 24u);
  EXPECT_EQ(c.outlier_scale, 1.5);
  EXPECT_NO_THROW(c.validate(100));
}

TEST(Config, Validation) {
  EmbedConfig c;
  c.watermark_length = 23;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_new_tokens = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  EXPECT_THROW(c.validate(1), ConfigError);
}

TEST(ConfigFile, ReadsEverySection) {
  auto c = parse(
      "[run]\n"
      "vocab = v.tsv\n"
      "payload = 1234\n"
      "provider = seeded-random\n"
      "provider-seed = 0x10\n"
      "outlier-rate = 0.5\n"
      "[embed]\n"
      "gamma = 0.375\n"
      "max-new-tokens = 200\n"
      "seed = 7775\n"
      "hash-mode = fixed\n"
      "start-on-newline = off\n"
      "[patterns]\n"
      "keywords = def class\n"
      "brackets = () []\n",
      "/tmp/cfg");
  EXPECT_EQ(c.vocab_path, "/tmp/cfg/v.tsv");
  EXPECT_EQ(c.payload, "1234");
  EXPECT_EQ(c.provider.kind, ProviderKind::seeded_random);
  EXPECT_EQ(c.provider.seed, 16u);
  EXPECT_EQ(c.provider.outlier_rate, 0.5);
  EXPECT_EQ(c.embed.gamma, 0.375);
  EXPECT_EQ(c.embed.max_new_tokens, 200u);
  EXPECT_EQ(c.embed.seed, 7775u);
  EXPECT_EQ(c.embed.hash_mode, HashMode::fixed);
  EXPECT_FALSE(c.embed.start_on_newline);
  EXPECT_EQ(c.embed.patterns.keywords, (std::vector<std::string>{"def", "class"}));
  ASSERT_EQ(c.embed.patterns.brackets.size(), 2u);
  EXPECT_EQ(c.embed.patterns.brackets[1].first, "[");
  EXPECT_EQ(c.embed.patterns.brackets[1].second, "]");
}

TEST(ConfigFile, AbsolutePathsKept) { EXPECT_EQ(parse("[run]\nvocab = /x/v.tsv\n", "/tmp").vocab_path, "/x/v.tsv"); }

TEST(ConfigFile, Rejections) {
  EXPECT_THROW(parse("[run]\nflavour = sweet\n"), ConfigError);
  EXPECT_THROW(parse("[nope]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("[embed]\ngamma = lots\n"), ConfigError);
  EXPECT_THROW(parse("[embed]\nhash-mode = rolling\n"), ConfigError);
  EXPECT_THROW(parse("[embed]\nwatermark = maybe\n"), ConfigError);
  EXPECT_THROW(parse("[patterns]\nbrackets = (]]\n"), ConfigError);
  EXPECT_THROW(parse("[run\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/run.ini"), ConfigError);
}

TEST(ConfigFile, Overrides) {
  RunConfig c;
  set_config_key(c, "embed", "watermark-length", "16");
  set_config_key(c, "run", "script", "3 1 4");
  EXPECT_EQ(c.embed.watermark_length, 16u);
  EXPECT_EQ(c.provider.script, (std::vector<TokenId>{3, 1, 4}));
}

TEST(ConfigFile, Numbers) {
  EXPECT_EQ(parse_u64("0x2545F4914F6CDD1D"), 0x2545F4914F6CDD1DULL);
  EXPECT_EQ(parse_u64("15485863"), 15485863u);
  EXPECT_THROW(parse_u64("-1"), ConfigError);
  EXPECT_THROW(parse_u64(""), ConfigError);
  EXPECT_TRUE(parse_bool("yes"));
  EXPECT_FALSE(parse_bool("0"));
}
