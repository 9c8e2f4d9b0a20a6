#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mrc/config.hpp"
#include "mrc/errors.hpp"
#include "mrc/text.hpp"

using namespace mrc;

namespace {

std::vector<std::string> texts(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& t : split_tokens(s)) out.push_back(t.text);
  return out;
}

std::string tmp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("utf8 helpers") {
  const std::string s = "a中b";
  CHECK(utf8_length(s) == 3);
  CHECK(utf8_substr(s, 1, 2) == "中");
  CHECK(utf8_encode(utf8_decode("héllo 世界")) == "héllo 世界");
  CHECK(contains_cjk("abc 中"));
  CHECK_FALSE(contains_cjk("abc"));
}

// Hand-segmented fixtures.
TEST_CASE("tokenizer fixtures") {
  struct Case {
    const char* text;
    std::vector<std::string> tokens;
  };
  const std::vector<Case> cases = {
      {"hello world", {"hello", "world"}},
      {"  leading and trailing  ", {"leading", "and", "trailing"}},
      {"", {}},
      {"   ", {}},
      {"one", {"one"}},
      {"Hello, world!", {"Hello", ",", "world", "!"}},
      {"what follows k3 ?", {"what", "follows", "k3", "?"}},
      {"don't", {"don", "'", "t"}},
      {"a-b", {"a", "-", "b"}},
      {"3.14", {"3", ".", "14"}},
      {"(x)", {"(", "x", ")"}},
      {"tab\tand\nnewline", {"tab", "and", "newline"}},
      {"中文", {"中", "文"}},
      {"我爱北京。", {"我", "爱", "北", "京", "。"}},
      {"k5后面是什么？", {"k5", "后", "面", "是", "什", "么", "？"}},
      {"abc中def", {"abc", "中", "def"}},
      {"w1 w2 ;", {"w1", "w2", ";"}},
      {"“quoted”", {"“", "quoted", "”"}},
      {"full　width space", {"full", "width", "space"}},
      {"Ünïcödé wörds", {"Ünïcödé", "wörds"}},
  };
  REQUIRE(cases.size() == 20);
  for (const auto& c : cases) {
    INFO(c.text);
    CHECK(texts(c.text) == c.tokens);
  }
}

TEST_CASE("token offsets are code points into the original text") {
  const std::string s = "我 爱 abc, d";
  const auto toks = split_tokens(s);
  REQUIRE(toks.size() == 5);
  for (const auto& t : toks) CHECK(utf8_substr(s, t.begin, t.end) == t.text);
  CHECK(toks[2].begin == 4);
  CHECK(toks[2].end == 7);
}

TEST_CASE("vocabulary reserved ids, lookup and file round trip") {
  Vocab v;
  CHECK(v.size() == Vocab::kReserved);
  CHECK(v.id("<CLS>") == Vocab::kCls);
  CHECK(v.id("<Sp>") == Vocab::kSep);
  const auto a = v.add("alpha");
  CHECK(a == 4);
  CHECK(v.add("alpha") == a);
  CHECK(v.id("missing") == Vocab::kUnk);
  const auto t = tokenize("alpha beta", v);
  CHECK(t.ids == std::vector<std::size_t>{4, Vocab::kUnk});

  const auto path = tmp_path("mrc_vocab_test.txt");
  v.add("中");
  v.save(path);
  const Vocab w = Vocab::load(path);
  CHECK(w.tokens() == v.tokens());

  std::ofstream(path) << "<CLS>\n<Sp>\n<PAD>\n<UNK>\nx\nx\n";
  CHECK_THROWS_AS(Vocab::load(path), DataError);
  std::ofstream(path) << "<CLS>\n<PAD>\n";
  CHECK_THROWS_AS(Vocab::load(path), DataError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Vocab::load("/nonexistent/vocab.txt"), DataError);
}

TEST_CASE("config parsing") {
  const Config c = parse_config("preset = reference\n# comment\nlr = 0.005   # trailing\nattention_mode = standard\n");
  CHECK(c.model.n_heads == 8);
  CHECK(c.train.lr == 0.005);
  CHECK(c.model.attention == AttentionMode::standard);
  CHECK(c.train.freeze_embeddings);

  const Config d = parse_config("");
  CHECK(d.model.n_heads == 2);
  CHECK(d.model.d_model == 64);

  CHECK_THROWS_AS(parse_config("lr = 1\npreset = desk\n"), UsageError);
  CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("lr = fast\n"), UsageError);
  CHECK_THROWS_AS(parse_config("lr 0.1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("n_heads = 3\n"), UsageError);  // 64 not divisible by 3
  CHECK_THROWS_AS(parse_config("task_ratio = 1.5\n"), UsageError);
}

TEST_CASE("config text round trip") {
  Config c = reference_preset();
  c.model.vocab_size = 123;
  c.train.alpha = 0.25;
  c.train.seed = 42;
  c.model.block_input = BlockInputMode::reread;
  const Config back = parse_config(config_to_text(c));
  CHECK(config_to_text(back) == config_to_text(c));
  CHECK(back.model.vocab_size == 123);
  CHECK(back.train.alpha == 0.25);
}
