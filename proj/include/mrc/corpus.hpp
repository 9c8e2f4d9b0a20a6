#pragma once

#include <cstddef>
#include <string>

#include "mrc/evaluate.hpp"

namespace mrc {

/// Everything a run needs from a data directory.
struct Corpus {
  Vocab vocab;
  MixedDataset train;
  EvalSets tests;
  std::size_t skipped = 0;  // MRC records lost to truncation or bad offsets
};

// The vocabulary is grown from the training records unless `fixed` is given
// (evaluation of a saved run), in which case unknown tokens map to <UNK>.
Corpus build_corpus(const SyntheticData& data, std::size_t max_seq_len, const Vocab* fixed = nullptr);

// Reads mrc_train.<tag>.json (one sub-dataset per tag), nli_train.tsv and
// mrc_test.<subset>.json from `dir`. Only the MRC training files are required.
Corpus load_corpus(const std::string& dir, std::size_t max_seq_len, const Vocab* fixed = nullptr);

}  // namespace mrc
