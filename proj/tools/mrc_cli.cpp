// mrc_cli: command-line front end for training, evaluation and audits.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "mrc/run_io.hpp"
#include "mrc/errors.hpp"

namespace fs = std::filesystem;
using namespace mrc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw DataError("cannot write " + path.string());
}

Config resolve_config(const std::string& path, std::optional<std::uint64_t> seed) {
  Config c = path.empty() ? desk_preset() : load_config(path);
  if (seed) c.train.seed = *seed;
  return c;
}

std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void write_report(const fs::path& out, const EvalReport& r) {
  write_file(out / "report.txt", r.to_text());
  write_file(out / "report.kv", r.to_kv());
  std::cout << r.to_text();
}

int run_gen_data(std::uint64_t seed, const std::string& out) {
  SyntheticSpec spec;
  spec.seed = seed;
  write_synthetic(out, gen_synthetic(spec));
  std::cout << "wrote synthetic data to " << out << "\n";
  return kOk;
}

int run_train(const std::string& config, const std::string& data, const std::string& out,
              std::optional<std::uint64_t> seed) {
  Config cfg = resolve_config(config, seed);
  const Corpus corpus = corpus_or_synthetic(data, cfg.model.max_seq_len, kDefaultDataSeed);
  cfg.model.vocab_size = corpus.vocab.size();
  TrainHooks<float> hooks;
  hooks.on_epoch = [](std::size_t epoch, const ParamStore<float>&) {
    std::cerr << "epoch " << epoch << " done\n";
    return false;
  };
  const auto run = train<float>(corpus.train, cfg, hooks);
  save_run(out, run, corpus.vocab, cfg);
  std::cout << "trained " << run.log.size() << " steps; final loss " << run.log.back().l_total << "\n";
  return kOk;
}

int run_eval(const std::vector<std::string>& checkpoints, const std::string& data, const std::string& out) {
  if (checkpoints.empty()) throw UsageError("at least one --checkpoint is required");
  std::vector<LoadedRun> runs;
  for (const auto& c : checkpoints) runs.push_back(load_run(c));
  for (const auto& r : runs)
    if (r.vocab.tokens() != runs.front().vocab.tokens()) throw DataError("ensemble members use different vocabularies");
  const LoadedRun& head = runs.front();
  const Corpus corpus = corpus_or_synthetic(data, head.cfg.model.max_seq_len, kDefaultDataSeed, &head.vocab);
  std::vector<const ParamStore<float>*> models;
  for (const auto& r : runs) models.push_back(&r.params);
  const std::string name = data.empty() ? "synthetic" : fs::path(data).filename().string();
  const auto report = evaluate<float>(name, models, head.cfg.model, eval_sets(corpus), head.cfg.train.max_answer_len,
                                      default_threads());
  write_report(out, report);
  return kOk;
}

int run_gradcheck(const std::string& config, const std::string& data, const std::string& out,
                  std::optional<std::uint64_t> seed, std::size_t coords) {
  Config cfg = resolve_config(config, seed);
  const Corpus corpus = corpus_or_synthetic(data, cfg.model.max_seq_len, kDefaultDataSeed);
  cfg.model.vocab_size = corpus.vocab.size();
  GradCheckOptions opts;
  opts.max_coords_per_param = coords;
  const auto report = audit_gradients(cfg, corpus.train, opts);
  write_file(fs::path(out) / "gradcheck.tsv", report.to_text());
  std::cout << (report.passed ? "PASS" : "FAIL") << " worst relative error " << report.worst() << " over "
            << report.entries.size() << " parameters\n";
  return report.passed ? kOk : kNumeric;
}

int run_sample_audit(const std::string& config, const std::string& data, const std::string& out,
                     std::optional<std::uint64_t> seed, std::vector<std::size_t> sizes, std::size_t draws) {
  const Config cfg = resolve_config(config, seed);
  std::vector<std::string> tags;
  if (!data.empty()) {
    const Corpus corpus = load_corpus(data, cfg.model.max_seq_len);
    sizes.clear();
    for (const auto& [tag, ex] : corpus.train.mrc) {
      tags.push_back(tag);
      sizes.push_back(ex.size());
    }
  } else {
    for (std::size_t j = 0; j < sizes.size(); ++j) tags.push_back("subset" + std::to_string(j));
  }
  // MRC-only plan: the audit covers the sub-dataset distribution.
  const SamplingPlan plan = make_plan(tags, sizes, 0, 0.0, cfg.train.seed);
  Rng rng(plan.seed);
  const auto batch = sample_batch(plan, draws, rng);
  std::vector<std::size_t> counts(sizes.size(), 0);
  for (const auto& s : batch) ++counts[s.subset];
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed;
  os << "subset\tsize\tprob\tfreq\tabs_diff\n";
  double worst = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const double freq = double(counts[j]) / double(draws);
    worst = std::max(worst, std::abs(freq - plan.probs[j]));
    os << plan.tags[j] << '\t' << sizes[j] << '\t' << plan.probs[j] << '\t' << freq << '\t'
       << std::abs(freq - plan.probs[j]) << '\n';
  }
  os << "draws\t" << draws << "\nmax_abs_diff\t" << worst << '\n';
  write_file(fs::path(out) / "sample_audit.tsv", os.str());
  std::cout << os.str();
  return kOk;
}

int run_ablate(const std::string& config, const std::string& data, const std::string& out,
               std::optional<std::uint64_t> seed) {
  Config cfg = resolve_config(config, seed);
  const Corpus corpus = corpus_or_synthetic(data, cfg.model.max_seq_len, kDefaultDataSeed);
  cfg.model.vocab_size = corpus.vocab.size();
  const auto table = ablate(cfg, corpus.train, eval_sets(corpus), default_threads());
  write_file(fs::path(out) / "ablation.tsv", table.to_text());
  write_file(fs::path(out) / "ablation.kv", table.to_kv());
  std::cout << table.to_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task reading comprehension toolkit"};
  app.require_subcommand(1);

  std::string config, data, out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> checkpoints;
  std::size_t coords = 0, draws = 100000;
  std::vector<std::size_t> sizes = {15000, 100000};

  auto common = [&](CLI::App* sub, bool with_data) {
    sub->add_option("--config", config, "config file (key = value)")->check(CLI::ExistingFile);
    if (with_data) sub->add_option("--data", data, "data directory (default: built-in synthetic set)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
  };

  auto* train_cmd = app.add_subcommand("train", "train a model and write a run directory");
  common(train_cmd, true);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate one checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoints, "run directory or checkpoint.bin")->required()->expected(1);
  eval_cmd->add_option("--data", data, "data directory");
  eval_cmd->add_option("--out", out, "output directory");

  auto* ens_cmd = app.add_subcommand("ensemble-eval", "evaluate the averaged prediction of several checkpoints");
  ens_cmd->add_option("--checkpoints", checkpoints, "run directories or checkpoint files")->required();
  ens_cmd->add_option("--data", data, "data directory");
  ens_cmd->add_option("--out", out, "output directory");

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference audit of the full model");
  common(grad_cmd, true);
  grad_cmd->add_option("--coords", coords, "coordinates probed per parameter (0 = all)");

  auto* gen_cmd = app.add_subcommand("gen-data", "write the synthetic corpus");
  gen_cmd->add_option("--out", out, "output directory");
  gen_cmd->add_option("--seed", seed, "generator seed (default 7)");

  auto* audit_cmd = app.add_subcommand("sample-audit", "empirical check of the sub-dataset sampler");
  common(audit_cmd, true);
  audit_cmd->add_option("--sizes", sizes, "sub-dataset sizes when no --data is given")->delimiter(',');
  audit_cmd->add_option("--draws", draws, "number of draws");

  auto* ablate_cmd = app.add_subcommand("ablate", "train and evaluate the four ablation variants");
  common(ablate_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return run_train(config, data, out, seed);
    if (*eval_cmd || *ens_cmd) return run_eval(checkpoints, data, out);
    if (*grad_cmd) return run_gradcheck(config, data, out, seed, coords);
    if (*gen_cmd) return run_gen_data(seed.value_or(kDefaultDataSeed), out);
    if (*audit_cmd) return run_sample_audit(config, data, out, seed, sizes, draws);
    if (*ablate_cmd) return run_ablate(config, data, out, seed);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
