#include "mrc/run_io.hpp"

#include <filesystem>

#include "mrc/errors.hpp"

namespace mrc {

LoadedRun load_run(const std::string& where) {
  namespace fs = std::filesystem;
  fs::path dir(where);
  fs::path ckpt = dir / "checkpoint.bin";
  if (fs::is_regular_file(dir)) {
    ckpt = dir;
    dir = dir.parent_path();
  }
  if (!fs::exists(ckpt)) throw DataError("no checkpoint at " + where);
  LoadedRun run;
  run.cfg = load_config((dir / "config.cfg").string());
  run.vocab = Vocab::load((dir / "vocab.txt").string());
  if (run.cfg.model.vocab_size != run.vocab.size())
    throw DataError("vocabulary mismatch: config says " + std::to_string(run.cfg.model.vocab_size) + ", vocab.txt has " +
                    std::to_string(run.vocab.size()));
  run.params = init_params<float>(run.cfg.model, run.cfg.train.seed);
  assign_checkpoint(run.params, read_checkpoint(ckpt.string()));
  return run;
}

Corpus corpus_or_synthetic(const std::string& data, std::size_t max_seq_len, std::uint64_t data_seed,
                           const Vocab* fixed) {
  if (!data.empty()) return load_corpus(data, max_seq_len, fixed);
  SyntheticSpec spec;
  spec.seed = data_seed;
  return build_corpus(gen_synthetic(spec), max_seq_len, fixed);
}

EvalSets eval_sets(const Corpus& corpus) { return corpus.tests.empty() ? EvalSets(corpus.train.mrc) : corpus.tests; }

}  // namespace mrc
