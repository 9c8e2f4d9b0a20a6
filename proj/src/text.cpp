#include "mrc/text.hpp"

#include <fstream>

#include "mrc/errors.hpp"

namespace mrc {

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    int len = 1;
    char32_t cp = b;
    if (b >= 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else if (b >= 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if (b >= 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if (b >= 0x80) {
      throw DataError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size()) throw DataError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (int k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) throw DataError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
      cp = (cp << 6) | (c & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

std::string utf8_substr(std::string_view s, std::size_t begin, std::size_t end) {
  const std::u32string cps = utf8_decode(s);
  if (begin > end || end > cps.size()) throw DataError("code-point range out of bounds");
  return utf8_encode(std::u32string_view(cps).substr(begin, end - begin));
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0xF900 && c <= 0xFAFF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2EBEF) || (c >= 0x3040 && c <= 0x30FF);
}

bool is_whitespace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == 0x00A0 || c == 0x3000 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x202F || c == 0x205F;
}

bool is_punctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  if (c >= 0x2010 && c <= 0x205E) return true;  // general punctuation
  if (c >= 0x3001 && c <= 0x303F) return true;  // CJK symbols and punctuation
  if (c >= 0xFF01 && c <= 0xFF0F) return true;  // fullwidth forms
  if (c >= 0xFF1A && c <= 0xFF20) return true;
  if (c >= 0xFF3B && c <= 0xFF40) return true;
  if (c >= 0xFF5B && c <= 0xFF65) return true;
  return c == 0x00A1 || c == 0x00A7 || c == 0x00AB || c == 0x00B6 || c == 0x00B7 || c == 0x00BB || c == 0x00BF;
}

bool contains_cjk(std::string_view s) {
  for (char32_t c : utf8_decode(s))
    if (is_cjk(c)) return true;
  return false;
}

std::vector<Token> split_tokens(std::string_view text) {
  const std::u32string cps = utf8_decode(text);
  std::vector<Token> out;
  std::size_t start = 0;
  bool in_word = false;
  auto flush = [&](std::size_t end) {
    if (in_word) out.push_back({utf8_encode(std::u32string_view(cps).substr(start, end - start)), start, end});
    in_word = false;
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (is_whitespace(c)) {
      flush(i);
    } else if (is_punctuation(c) || is_cjk(c)) {
      flush(i);
      out.push_back({utf8_encode(std::u32string(1, c)), i, i + 1});
    } else if (!in_word) {
      in_word = true;
      start = i;
    }
  }
  flush(cps.size());
  return out;
}

Vocab::Vocab() {
  for (const char* t : {"<CLS>", "<Sp>", "<PAD>", "<UNK>"}) add(t);
}

std::size_t Vocab::add(const std::string& token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  ids_.emplace(token, tokens_.size());
  tokens_.push_back(token);
  return tokens_.size() - 1;
}

std::size_t Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

void Vocab::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open " + path + " for writing");
  for (const auto& t : tokens_) f << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open vocabulary " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(f, line);) lines.push_back(line);
  const char* reserved[] = {"<CLS>", "<Sp>", "<PAD>", "<UNK>"};
  if (lines.size() < kReserved) throw DataError(path + ": vocabulary shorter than the reserved block");
  for (std::size_t i = 0; i < kReserved; ++i)
    if (lines[i] != reserved[i]) throw DataError(path + ":" + std::to_string(i + 1) + ": expected reserved token " + reserved[i]);
  Vocab v;
  for (std::size_t i = kReserved; i < lines.size(); ++i) {
    if (v.contains(lines[i])) throw DataError(path + ":" + std::to_string(i + 1) + ": duplicate token " + lines[i]);
    v.add(lines[i]);
  }
  return v;
}

TokenizedText tokenize(std::string_view text, const Vocab& vocab) {
  TokenizedText out;
  out.tokens = split_tokens(text);
  out.ids.reserve(out.tokens.size());
  for (const auto& t : out.tokens) out.ids.push_back(vocab.id(t.text));
  return out;
}

}  // namespace mrc
