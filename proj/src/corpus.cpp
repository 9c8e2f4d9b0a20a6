#include "mrc/corpus.hpp"

#include <algorithm>
#include <filesystem>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

struct RawCorpus {
  std::vector<std::pair<std::string, std::vector<MrcRecord>>> train;
  std::vector<NliRecord> nli;
  std::vector<std::pair<std::string, std::vector<MrcRecord>>> tests;
  std::size_t dropped = 0;
};

Corpus assemble(const RawCorpus& raw, std::size_t max_seq_len, const Vocab* fixed) {
  Corpus c;
  c.skipped = raw.dropped;
  if (fixed) {
    c.vocab = *fixed;
  } else {
    for (const auto& [tag, recs] : raw.train) extend_vocab(c.vocab, recs, {});
    extend_vocab(c.vocab, {}, raw.nli);
  }
  for (const auto& [tag, recs] : raw.train) {
    std::size_t skipped = 0;
    auto examples = make_mrc_examples(recs, c.vocab, max_seq_len, &skipped);
    c.skipped += skipped;
    if (examples.empty()) throw DataError("MRC sub-dataset '" + tag + "' has no usable samples");
    c.train.mrc[tag] = std::move(examples);
  }
  c.train.nli = make_nli_examples(raw.nli, c.vocab);
  for (const auto& [name, recs] : raw.tests) {
    std::size_t skipped = 0;
    c.tests[name] = make_mrc_examples(recs, c.vocab, max_seq_len, &skipped);
    c.skipped += skipped;
  }
  return c;
}

// "<prefix><middle>.<ext>" -> middle
std::string middle_of(const std::string& file, const std::string& prefix, const std::string& ext) {
  return file.substr(prefix.size(), file.size() - prefix.size() - ext.size());
}

}  // namespace

Corpus build_corpus(const SyntheticData& data, std::size_t max_seq_len, const Vocab* fixed) {
  RawCorpus raw;
  raw.train = data.train;
  raw.nli = data.nli;
  raw.tests = {{"adversarial", data.test_adversarial},
               {"in_domain", data.test_in_domain},
               {"paraphrase", data.test_paraphrase}};
  return assemble(raw, max_seq_len, fixed);
}

Corpus load_corpus(const std::string& dir, std::size_t max_seq_len, const Vocab* fixed) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("data directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());

  RawCorpus raw;
  const std::string train_prefix = "mrc_train.", test_prefix = "mrc_test.", ext = ".json";
  auto matches = [&](const std::string& f, const std::string& prefix) {
    return f.size() > prefix.size() + ext.size() && f.rfind(prefix, 0) == 0 &&
           f.compare(f.size() - ext.size(), ext.size(), ext) == 0;
  };
  for (const auto& f : files) {
    const std::string path = (fs::path(dir) / f).string();
    if (matches(f, train_prefix)) {
      const std::string tag = middle_of(f, train_prefix, ext);
      auto loaded = load_mrc_json(path, tag);
      raw.dropped += loaded.dropped;
      raw.train.emplace_back(tag, std::move(loaded.records));
    } else if (matches(f, test_prefix)) {
      const std::string name = middle_of(f, test_prefix, ext);
      auto loaded = load_mrc_json(path, name);
      raw.dropped += loaded.dropped;
      raw.tests.emplace_back(name, std::move(loaded.records));
    }
  }
  if (raw.train.empty()) throw DataError("no mrc_train.<tag>.json files in " + dir);
  const fs::path nli = fs::path(dir) / "nli_train.tsv";
  if (fs::exists(nli)) raw.nli = load_nli_pairs(nli.string());
  return assemble(raw, max_seq_len, fixed);
}

}  // namespace mrc
