#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mrc {

// UTF-8 <-> code points. Offsets throughout the toolkit count code points,
// matching the answer_start convention of SQuAD-style corpora.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::size_t utf8_length(std::string_view s);
// Code points [begin, end) of `s`, re-encoded.
std::string utf8_substr(std::string_view s, std::size_t begin, std::size_t end);

bool is_cjk(char32_t c);
bool is_whitespace(char32_t c);
bool is_punctuation(char32_t c);
bool contains_cjk(std::string_view s);

struct Token {
  std::string text;
  std::size_t begin = 0;  // code-point offset, inclusive
  std::size_t end = 0;    // exclusive
};

/// Splits on whitespace; punctuation and CJK ideographs become one token each.
std::vector<Token> split_tokens(std::string_view text);

class Vocab {
 public:
  static constexpr std::size_t kCls = 0;
  static constexpr std::size_t kSep = 1;
  static constexpr std::size_t kPad = 2;
  static constexpr std::size_t kUnk = 3;
  static constexpr std::size_t kReserved = 4;

  Vocab();

  std::size_t add(const std::string& token);
  std::size_t id(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line; the id is the line index.
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

struct TokenizedText {
  std::vector<std::size_t> ids;
  std::vector<Token> tokens;
};

TokenizedText tokenize(std::string_view text, const Vocab& vocab);

}  // namespace mrc
