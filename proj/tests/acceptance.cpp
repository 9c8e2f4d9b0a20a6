// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance 2 5 7      a subset

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "mrc/decoder.hpp"
#include "mrc/errors.hpp"
#include "mrc/run_io.hpp"
#include "oracles.hpp"

using namespace mrc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Tensor<double> random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo, double hi) {
  Tensor<double> t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

double row_sum(const Tensor<double>& t, std::size_t r) {
  double s = 0;
  for (double v : t.row_span(r)) s += v;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Corpus desk_corpus(Config& cfg, const SyntheticSpec& spec = {}) {
  Corpus c = build_corpus(gen_synthetic(spec), cfg.model.max_seq_len);
  cfg.model.vocab_size = c.vocab.size();
  return c;
}

// 1. Finite-difference audit of the full desk model in 64-bit mode.
Outcome gradient_audit() {
  Config cfg = desk_preset();
  const Corpus corpus = desk_corpus(cfg);
  GradCheckOptions opts;
  opts.max_coords_per_param = 40;
  const auto t0 = Clock::now();
  const auto report = audit_gradients(cfg, corpus.train, opts);
  const double secs = seconds_since(t0);
  std::size_t probed = 0, failed = 0;
  for (const auto& e : report.entries) {
    probed += e.probed;
    failed += !e.passed;
  }
  const bool every = report.entries.size() == init_params<double>(cfg.model, cfg.train.seed).size();
  return {report.passed && every && secs < 60,
          fmt("N=%zu h=%zu d_model=%zu: %zu/%zu parameters pass, %zu coordinates, worst rel err %.3g (< 1e-4), %.1f s "
              "(< 60 s)",
              cfg.model.n_blocks, cfg.model.n_heads, cfg.model.d_model, report.entries.size() - failed,
              report.entries.size(), probed, report.worst(), secs)};
}

// 2. mem_att against the entry-by-entry expansion of Eq. 3.
Outcome mematt_oracle() {
  Rng rng(31337);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 1 + rng.index(8), d = 1 + rng.index(8), dv = 1 + rng.index(8);
    const auto q = random_tensor(L, d, rng, -2, 2), k = random_tensor(L, d, rng, -2, 2),
               v = random_tensor(L, dv, rng, -1, 1);
    ad::Tape<double> tape;
    const auto r = mem_att(tape.constant(q), tape.constant(k), tape.constant(v));
    const std::vector<unsigned char> all(L, 1);
    const auto ref = oracle::naive_mem_att(oracle::to_mat(q), oracle::to_mat(k), oracle::to_mat(v), all, all);
    worst = std::max(worst, oracle::max_abs_diff(ref, r.output.value()));
  }
  return {worst < 1e-6, fmt("100 instances, L <= 8, d_head <= 8: max abs diff %.3g (< 1e-6)", worst)};
}

// 3. Row sums of the directional and combined weights; swap symmetry.
Outcome attention_invariants() {
  Rng rng(4242);
  double dir_err = 0, sum_err = 0;
  std::size_t asymmetric = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 1 + rng.index(8), d = 1 + rng.index(8);
    const auto q = random_tensor(L, d, rng, -3, 3), k = random_tensor(L, d, rng, -3, 3),
               v = random_tensor(L, 1 + rng.index(8), rng, -1, 1);
    ad::Tape<double> tape;
    const auto a = mem_att(tape.constant(q), tape.constant(k), tape.constant(v));
    const auto b = mem_att(tape.constant(k), tape.constant(q), tape.constant(v));
    for (std::size_t r = 0; r < L; ++r) {
      dir_err = std::max({dir_err, std::abs(row_sum(a.q2k.value(), r) - 1), std::abs(row_sum(a.k2q.value(), r) - 1)});
      sum_err = std::max(sum_err, std::abs(row_sum(a.combined.value(), r) - 2));
    }
    asymmetric += !(a.output.value() == b.output.value());
  }
  return {dir_err < 1e-6 && sum_err < 1e-6 && asymmetric == 0,
          fmt("100 instances: directional row-sum err %.3g, combined row-sum err %.3g (< 1e-6), %zu swap mismatches",
              dir_err, sum_err, asymmetric)};
}

// 4. Memorise a 256-sample MRC set.
Outcome overfit() {
  Config cfg = desk_preset();
  cfg.train.epochs = 200;
  SyntheticSpec spec;
  spec.languages = {"en"};
  spec.train_counts = {256};
  spec.nli_count = 0;
  const Corpus corpus = desk_corpus(cfg, spec);
  EvalSets train_set{{"train", corpus.train.mrc.begin()->second}};
  double em = 0;
  std::size_t epoch_hit = 0;
  TrainHooks<float> hooks;
  hooks.on_epoch = [&](std::size_t epoch, const ParamStore<float>& p) {
    em = evaluate<float>("train", {&p}, cfg.model, train_set, cfg.train.max_answer_len).em;
    if (em >= 95.0) epoch_hit = epoch;
    return epoch_hit != 0;
  };
  const auto t0 = Clock::now();
  train<float>(corpus.train, cfg, hooks);
  const double secs = seconds_since(t0);
  return {epoch_hit != 0 && secs < 600,
          fmt("256 samples: train EM %.2f%% %s, %.1f s (< 600 s)", em,
              epoch_hit ? fmt("reached at epoch %zu (<= 200)", epoch_hit).c_str() : "not reached in 200 epochs", secs)};
}

// 5. Sub-dataset sampler frequencies and reproducibility.
Outcome sampler_audit() {
  const auto plan = make_plan({"small", "large"}, {15000, 100000}, 0, 0.0, 20240601);
  const bool probs_ok = std::abs(plan.probs[0] - 0.1304) < 5e-5 && std::abs(plan.probs[1] - 0.8696) < 5e-5;
  Rng r1(plan.seed), r2(plan.seed);
  const auto a = sample_batch(plan, 100000, r1);
  const auto b = sample_batch(plan, 100000, r2);
  std::size_t counts[2] = {0, 0};
  for (const auto& s : a) ++counts[s.subset];
  const double d0 = std::abs(counts[0] / 1e5 - plan.probs[0]), d1 = std::abs(counts[1] / 1e5 - plan.probs[1]);
  return {probs_ok && d0 <= 0.01 && d1 <= 0.01 && a == b,
          fmt("probs {%.4f, %.4f}, freqs {%.4f, %.4f}, max diff %.4f (<= 0.01), reseeded sequence %s", plan.probs[0],
              plan.probs[1], counts[0] / 1e5, counts[1] / 1e5, std::max(d0, d1), a == b ? "identical" : "differs")};
}

// 6. joint_loss arithmetic; alpha = 0 leaves the NLI head without gradient.
Outcome loss_composition() {
  const double j = joint_loss(0.6, 1.0, 0.5, 1.0);
  Config cfg = desk_preset();
  cfg.train.alpha = 0.0;
  cfg.train.epochs = 2;
  const Corpus corpus = desk_corpus(cfg);
  std::size_t steps = 0, nonzero_steps = 0, nli_steps = 0;
  TrainHooks<float> hooks;
  hooks.on_step = [&](const StepRecord& r, const ParamStore<float>& p, const std::vector<Tensor<float>>& g) {
    ++steps;
    nli_steps += r.n_nli > 0;
    bool zero = true;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (param_group(p.items()[k].name) == ParamGroup::nli)
        for (float x : g[k].values()) zero &= x == 0.0f;
    nonzero_steps += !zero;
  };
  train<float>(corpus.train, cfg, hooks);
  return {j == 1.3 && steps > 0 && nli_steps > 0 && nonzero_steps == 0,
          fmt("joint_loss(0.6, 1.0, 0.5, 1) = %.17g; alpha=0: %zu/%zu steps with nonzero theta_N grads (%zu steps saw "
              "NLI samples)",
              j, nonzero_steps, steps, nli_steps)};
}

// 7. Hand-computed metric fixtures.
Outcome metric_fixtures() {
  struct Em {
    const char *p, *g;
    int want;
  };
  struct F1 {
    const char *p, *g;
    double want;
  };
  const Em ems[] = {{"The Cat", "cat", 1}, {"cat", "dog", 0}, {"", "", 1}, {"the Eiffel Tower.", "Eiffel tower", 1},
                    {"云南", "云南", 1},     {"云", "云南", 0},   {"b c", "a b c", 0}};
  const F1 f1s[] = {{"b c", "a b c", 0.8},     {"cat", "cat", 1.0},  {"cat", "dog", 0.0},
                    {"", "", 1.0},             {"", "dog", 0.0},     {"Eiffel Paris", "Eiffel", 2.0 / 3.0},
                    {"x x x", "x y", 0.4},     {"云", "云南", 2.0 / 3.0}};
  std::size_t total = 0, ok = 0;
  std::string bad;
  for (const auto& c : ems) {
    ++total;
    if (exact_match(c.p, c.g) == c.want) ++ok;
    else bad += fmt(" EM(\"%s\",\"%s\")", c.p, c.g);
  }
  for (const auto& c : f1s) {
    ++total;
    if (token_f1(c.p, c.g) == c.want) ++ok;
    else bad += fmt(" F1(\"%s\",\"%s\")=%.17g", c.p, c.g, token_f1(c.p, c.g));
  }
  return {ok == total, fmt("%zu/%zu fixtures exact, F1(\"b c\",\"a b c\") = %.17g", ok, total, token_f1("b c", "a b c")) +
                           (bad.empty() ? "" : "; mismatches:" + bad)};
}

// 8. Two identical runs give identical files.
Outcome determinism(const fs::path& scratch) {
  Config cfg = desk_preset();
  cfg.train.epochs = 2;
  const Corpus corpus = desk_corpus(cfg);
  for (const char* name : {"a", "b"}) save_run((scratch / name).string(), train<float>(corpus.train, cfg), corpus.vocab, cfg);
  const bool ckpt = slurp(scratch / "a" / "checkpoint.bin") == slurp(scratch / "b" / "checkpoint.bin");
  const bool log = slurp(scratch / "a" / "metrics.tsv") == slurp(scratch / "b" / "metrics.tsv");
  return {ckpt && log, fmt("checkpoints %s, metric logs %s", ckpt ? "identical" : "differ", log ? "identical" : "differ")};
}

// 9. An ensemble of four copies equals the single model.
Outcome ensemble(const fs::path& scratch) {
  const fs::path run = scratch / "a";
  if (!fs::exists(run / "checkpoint.bin")) determinism(scratch);
  const LoadedRun lr = load_run(run.string());
  const Corpus corpus = corpus_or_synthetic("", lr.cfg.model.max_seq_len, kDefaultDataSeed, &lr.vocab);
  const std::vector<const ParamStore<float>*> four(4, &lr.params);
  double diff = 0, sum_err = 0;
  std::size_t n = 0;
  for (const auto& [name, examples] : corpus.tests)
    for (const auto& ex : examples) {
      const auto one = predict_distribution(lr.params, lr.cfg.model, ex);
      const auto avg = ensemble_predict(four, lr.cfg.model, ex);
      for (auto [a, b] : {std::pair{&one.start, &avg.start}, std::pair{&one.end, &avg.end}}) {
        double s = 0;
        for (std::size_t i = 0; i < a->size(); ++i) {
          diff = std::max(diff, std::abs((*a)[i] - (*b)[i]));
          s += (*b)[i];
        }
        sum_err = std::max(sum_err, std::abs(s - 1));
      }
      ++n;
    }
  return {diff <= 1e-7 && sum_err <= 1e-6,
          fmt("%zu examples: max |ensemble - single| %.3g (<= 1e-7), max |sum - 1| %.3g (<= 1e-6)", n, diff, sum_err)};
}

// 10. Paraphrase EM of the full model against alpha = 0, three seeds.
Outcome robustness_trend() {
  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    double em[2];
    for (int variant = 0; variant < 2; ++variant) {
      Config cfg = desk_preset();
      cfg.train.seed = seed;
      if (variant == 1) cfg.train.alpha = 0.0;
      const Corpus corpus = desk_corpus(cfg);
      const auto run = train<float>(corpus.train, cfg);
      em[variant] = evaluate<float>("synthetic", {&run.params}, cfg.model, corpus.tests, cfg.train.max_answer_len)
                        .subset("paraphrase")
                        .em;
    }
    wins += em[0] >= em[1];
    detail += fmt("%sseed %llu: full %.2f vs alpha=0 %.2f", detail.empty() ? "" : "; ", (unsigned long long)seed, em[0],
                  em[1]);
  }
  return {wins >= 2, fmt("full >= alpha=0 in %zu/3 seeds (need 2): ", wins) + detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  const fs::path scratch = fs::temp_directory_path() / "mrc_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"gradient audit", gradient_audit},
      {"MemAtt oracle equivalence", mematt_oracle},
      {"attention invariants", attention_invariants},
      {"overfit smoke test", overfit},
      {"sampler audit", sampler_audit},
      {"loss composition", loss_composition},
      {"metric fixtures", metric_fixtures},
      {"determinism", [&] { return determinism(scratch); }},
      {"ensemble", [&] { return ensemble(scratch); }},
      {"robustness trend", robustness_trend},
  };
  int failures = 0;
  for (int i = 0; i < 10; ++i) {
    if (!wanted.empty() && !wanted.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
