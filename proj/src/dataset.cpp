#include "mrc/dataset.hpp"

namespace mrc {

std::size_t MixedDataset::total() const {
  std::size_t n = nli.size();
  for (const auto& [tag, v] : mrc) n += v.size();
  return n;
}

void extend_vocab(Vocab& vocab, const std::vector<MrcRecord>& mrc, const std::vector<NliRecord>& nli) {
  auto add_text = [&](const std::string& s) {
    for (const auto& t : split_tokens(s)) vocab.add(t.text);
  };
  for (const auto& r : mrc) {
    add_text(r.question);
    add_text(r.passage);
  }
  for (const auto& r : nli) {
    add_text(r.s1);
    add_text(r.s2);
  }
}

std::vector<MrcExample> make_mrc_examples(const std::vector<MrcRecord>& records, const Vocab& vocab,
                                          std::size_t max_seq_len, std::size_t* skipped) {
  std::vector<MrcExample> out;
  std::size_t lost = 0;
  for (const auto& r : records) {
    MrcExample ex;
    ex.id = r.id;
    ex.language = r.language;
    ex.passage = r.passage;
    auto q = tokenize(r.question, vocab);
    auto p = tokenize(r.passage, vocab);
    if (q.ids.empty() || p.ids.empty() || q.ids.size() + 4 > max_seq_len) {
      ++lost;
      continue;
    }
    const auto [s, e] = align_answer_span(p.tokens, r.passage, r.answers.front().text, r.answers.front().start);
    const std::size_t room = max_seq_len - q.ids.size() - 3;
    if (e >= room) {
      ++lost;
      continue;
    }
    if (p.ids.size() > room) {
      p.ids.resize(room);
      p.tokens.resize(room);
    }
    ex.question_ids = std::move(q.ids);
    ex.passage_ids = std::move(p.ids);
    ex.passage_tokens = std::move(p.tokens);
    ex.start_token = s;
    ex.end_token = e;
    for (const auto& a : r.answers) ex.gold_answers.push_back(a.text);
    out.push_back(std::move(ex));
  }
  if (skipped) *skipped = lost;
  return out;
}

std::vector<NliExample> make_nli_examples(const std::vector<NliRecord>& records, const Vocab& vocab) {
  std::vector<NliExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    NliExample ex{tokenize(r.s1, vocab).ids, tokenize(r.s2, vocab).ids, r.label};
    if (ex.s1.empty() || ex.s2.empty()) throw DataError("NLI pair with an empty sentence");
    out.push_back(std::move(ex));
  }
  return out;
}

std::string span_text(const MrcExample& ex, std::size_t start_token, std::size_t end_token) {
  if (start_token > end_token || end_token >= ex.passage_tokens.size()) return {};
  return utf8_substr(ex.passage, ex.passage_tokens[start_token].begin, ex.passage_tokens[end_token].end);
}

}  // namespace mrc
