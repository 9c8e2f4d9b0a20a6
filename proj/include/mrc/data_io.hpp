#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrc/text.hpp"

namespace mrc {

struct Answer {
  std::string text;
  std::size_t start = 0;  // code-point offset into the passage
};

struct MrcRecord {
  std::string id;
  std::string passage;
  std::string question;
  std::vector<Answer> answers;  // the first one is the training target
  std::string language;
};

struct NliRecord {
  std::string s1;
  std::string s2;
  int label = 0;
};

struct MrcLoadResult {
  std::vector<MrcRecord> records;
  std::size_t dropped = 0;
  std::vector<std::string> drop_reasons;
};

// Nested {data: [{paragraphs: [{context, qas: [{id, question, answers:
// [{text, answer_start}]}]}]}]} schema. Records whose answers do not occur at
// their stated offsets are dropped and counted.
MrcLoadResult parse_mrc_json(std::string_view json_text, const std::string& language, const std::string& source = "<memory>");
MrcLoadResult load_mrc_json(const std::string& path, const std::string& language);
void write_mrc_json(const std::string& path, const std::vector<MrcRecord>& records, const std::string& title);
std::string mrc_json_text(const std::vector<MrcRecord>& records, const std::string& title);

// sentence1 TAB sentence2 TAB label{0,1}, one pair per line.
std::vector<NliRecord> parse_nli_pairs(std::string_view text, const std::string& source = "<memory>");
std::vector<NliRecord> load_nli_pairs(const std::string& path);
void write_nli_pairs(const std::string& path, const std::vector<NliRecord>& records);

/// Smallest token window covering answer code points
/// [offset, offset + |answer|). Throws DataError if the passage does not
/// contain `answer` at `offset` or no token overlaps it.
std::pair<std::size_t, std::size_t> align_answer_span(const std::vector<Token>& passage_tokens, std::string_view passage,
                                                      std::string_view answer, std::size_t offset);

// ---------------------------------------------------------------------------
// Synthetic robustness data.
//
// Passages are random filler tokens in `;`-terminated segments, one of which
// carries the keyed marker: `x.. KEY y.. ;`. A question names the key and a
// direction (tokens after / before it up to the segment boundary), so the
// key determines a unique gold span. Paraphrase questions reword the
// template without changing its meaning; adversarial questions flip the
// single direction token, which moves the gold span.

struct SyntheticSpec {
  std::uint64_t seed = 7;
  std::size_t vocab_size = 20;  // filler tokens per language
  std::size_t key_count = 4;    // key tokens per language
  std::size_t passage_len_min = 8;   // tokens, delimiters included
  std::size_t passage_len_max = 10;
  std::size_t span_len_max = 2;
  std::vector<std::string> languages = {"en", "zh"};
  std::vector<std::size_t> train_counts = {256, 128};  // MRC training samples per language
  std::size_t nli_count = 256;
  std::size_t test_in_domain = 256;
  std::size_t test_paraphrase = 256;
  std::size_t test_adversarial = 256;

  void validate() const;
};

struct SyntheticData {
  std::vector<std::pair<std::string, std::vector<MrcRecord>>> train;  // per language, spec order
  std::vector<NliRecord> nli;
  std::vector<MrcRecord> test_in_domain;  // first language
  std::vector<MrcRecord> test_paraphrase;
  std::vector<MrcRecord> test_adversarial;
};

SyntheticData gen_synthetic(const SyntheticSpec& spec);

// Writes mrc_train.<lang>.json, nli_train.tsv, mrc_test.<subset>.json.
void write_synthetic(const std::string& dir, const SyntheticData& data);

}  // namespace mrc
