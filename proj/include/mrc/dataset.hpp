#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mrc/data_io.hpp"
#include "mrc/encoder.hpp"

namespace mrc {

/// Tokenized MRC triple ready for the model.
struct MrcExample {
  std::string id;
  std::string language;
  std::string passage;
  std::vector<Token> passage_tokens;
  std::vector<std::size_t> passage_ids;
  std::vector<std::size_t> question_ids;
  std::vector<std::string> gold_answers;
  std::size_t start_token = 0;  // gold span, passage-token indices
  std::size_t end_token = 0;
};

struct NliExample {
  std::vector<std::size_t> s1;
  std::vector<std::size_t> s2;
  int label = 0;
};

/// NLI pairs plus one MRC sub-dataset per language tag.
struct MixedDataset {
  std::vector<NliExample> nli;
  std::map<std::string, std::vector<MrcExample>> mrc;

  std::size_t total() const;
};

// Adds every token of the records to `vocab`.
void extend_vocab(Vocab& vocab, const std::vector<MrcRecord>& mrc, const std::vector<NliRecord>& nli);

// Tokenizes and aligns. Records whose gold span does not survive truncation
// to max_seq_len are skipped and counted in `skipped` when provided.
std::vector<MrcExample> make_mrc_examples(const std::vector<MrcRecord>& records, const Vocab& vocab,
                                          std::size_t max_seq_len, std::size_t* skipped = nullptr);
std::vector<NliExample> make_nli_examples(const std::vector<NliRecord>& records, const Vocab& vocab);

// Passage-token text for [start, end] (inclusive), cut from the original
// passage by code-point offsets.
std::string span_text(const MrcExample& ex, std::size_t start_token, std::size_t end_token);

}  // namespace mrc
