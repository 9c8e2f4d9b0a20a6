#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mrc {

// Whitespace languages: lowercase, drop punctuation and the articles
// a/an/the, collapse whitespace. Text containing CJK ideographs, or made only
// of one-character words ("a b c"), is split into single characters and
// otherwise left as is.
std::vector<std::string> answer_tokens(std::string_view text);
std::string normalize_answer(std::string_view text);

int exact_match(std::string_view prediction, std::string_view gold);
double token_f1(std::string_view prediction, std::string_view gold);

// Max over the gold set; an empty gold set scores against "".
int exact_match_any(std::string_view prediction, const std::vector<std::string>& golds);
double token_f1_any(std::string_view prediction, const std::vector<std::string>& golds);

struct SubsetScore {
  std::string name;
  double em = 0;  // percentages
  double f1 = 0;
  std::size_t count = 0;
};

struct EvalReport {
  std::string dataset;
  double em = 0;
  double f1 = 0;
  std::size_t count = 0;
  std::vector<SubsetScore> subsets;

  const SubsetScore& subset(const std::string& name) const;
  std::string to_text() const;
  // key=value lines: dataset, all.*, then <subset>.* in report order.
  std::string to_kv() const;
};

struct ScoredSample {
  std::string subset;
  std::string prediction;
  std::vector<std::string> golds;
};

// Subsets keep first-appearance order; sums run in sample order.
EvalReport score_predictions(const std::string& dataset, const std::vector<ScoredSample>& samples);

}  // namespace mrc
