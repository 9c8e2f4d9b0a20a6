#pragma once

#include <cstdint>
#include <string>

#include "mrc/corpus.hpp"

namespace mrc {

/// A saved run: checkpoint.bin, vocab.txt and config.cfg in one directory.
struct LoadedRun {
  Config cfg;
  Vocab vocab;
  ParamStore<float> params;
};

// `where` is the run directory or the checkpoint.bin inside it.
LoadedRun load_run(const std::string& where);

// The corpus in `data`, or the built-in synthetic set drawn with `data_seed`
// when `data` is empty.
Corpus corpus_or_synthetic(const std::string& data, std::size_t max_seq_len, std::uint64_t data_seed,
                           const Vocab* fixed = nullptr);

// Test sets of the corpus, or its MRC training sets when it has none.
EvalSets eval_sets(const Corpus& corpus);

inline constexpr std::uint64_t kDefaultDataSeed = 7;

}  // namespace mrc
