#include "mrc/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mrc/errors.hpp"

namespace mrc {

double joint_loss(std::optional<double> nli, std::optional<double> mrc, double alpha, double beta) {
  if (!nli && !mrc) throw UsageError("joint_loss: batch has neither NLI nor MRC samples");
  double total = 0;
  if (nli) total += alpha * *nli;
  if (mrc) total += beta * *mrc;
  return total;
}

template <typename Real>
ad::Var<Real> joint_loss(const std::optional<ad::Var<Real>>& nli, const std::optional<ad::Var<Real>>& mrc, Real alpha,
                         Real beta) {
  if (!nli && !mrc) throw UsageError("joint_loss: batch has neither NLI nor MRC samples");
  std::vector<ad::Var<Real>> terms;
  if (nli) terms.push_back(ad::scale(*nli, alpha));
  if (mrc) terms.push_back(ad::scale(*mrc, beta));
  return terms.size() == 1 ? terms.front() : ad::add_scalars(terms);
}

template <typename Real>
AdamW<Real>::AdamW(const ParamStore<Real>& params, const TrainConfig& cfg)
    : lr_(cfg.lr), beta1_(cfg.adam_beta1), beta2_(cfg.adam_beta2), eps_(cfg.adam_eps), weight_decay_(cfg.weight_decay) {
  for (const auto& p : params.items()) {
    m_.emplace_back(p.value.rows(), p.value.cols(), Real(0));
    v_.emplace_back(p.value.rows(), p.value.cols(), Real(0));
  }
}

template <typename Real>
void AdamW<Real>::step(ParamStore<Real>& params, const std::vector<Tensor<Real>>& grads,
                       const std::vector<bool>& frozen) {
  auto& items = params.items();
  if (grads.size() != items.size() || m_.size() != items.size()) throw ShapeError("AdamW: gradient count mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k < frozen.size() && frozen[k]) continue;
    auto& w = items[k].value;
    const auto& g = grads[k];
    if (!g.same_shape(w)) throw ShapeError("AdamW: gradient shape mismatch for " + items[k].name);
    const double decay = items[k].decay ? weight_decay_ : 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      const double m = beta1_ * m_[k][i] + (1 - beta1_) * gi;
      const double v = beta2_ * v_[k][i] + (1 - beta2_) * gi * gi;
      m_[k][i] = Real(m);
      v_[k][i] = Real(v);
      const double update = (m / bc1) / (std::sqrt(v / bc2) + eps_) + decay * double(w[i]);
      w[i] = Real(double(w[i]) - lr_ * update);
    }
  }
}

template <typename Real>
double clip_global_norm(std::vector<Tensor<Real>>& grads, double max_norm) {
  double sq = 0;
  for (const auto& g : grads)
    for (std::size_t i = 0; i < g.size(); ++i) sq += double(g[i]) * double(g[i]);
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto& g : grads)
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = Real(double(g[i]) * f);
  }
  return norm;
}

namespace {

std::string fmt_loss(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::setprecision(9) << *v;
  return os.str();
}

}  // namespace

std::string metrics_header() { return "step\ttask_mix\tL_NLI\tL_MRC\tL_total"; }

std::string format_step(const StepRecord& r) {
  std::ostringstream os;
  os << r.step << '\t' << "nli=" << r.n_nli << ",mrc=" << r.n_mrc << '\t' << fmt_loss(r.l_nli) << '\t'
     << fmt_loss(r.l_mrc) << '\t' << fmt_loss(r.l_total);
  return os.str();
}

template <typename Real>
ad::Var<Real> batch_loss(ParamBinder<Real>& p, const ModelConfig& mcfg, const TrainConfig& tcfg,
                         const MixedDataset& data, const SamplingPlan& plan, const std::vector<TaskSample>& batch,
                         StepRecord* record) {
  StepRecord local;
  StepRecord& rec = record ? *record : local;
  std::vector<ad::Var<Real>> yhat;
  std::vector<int> labels;
  std::vector<SpanOutput<Real>> spans;
  std::vector<SpanTarget> targets;
  for (const auto& s : batch) {
    if (s.kind == TaskSample::Kind::nli) {
      const NliExample& ex = data.nli.at(s.index);
      yhat.push_back(forward_nli(p, mcfg, ex).yhat);
      labels.push_back(ex.label);
      ++rec.n_nli;
    } else {
      const MrcExample& ex = data.mrc.at(plan.tags.at(s.subset)).at(s.index);
      auto f = forward_mrc(p, mcfg, ex);
      spans.push_back(f.span);
      targets.push_back(f.target);
      ++rec.n_mrc;
    }
  }

  std::optional<ad::Var<Real>> l_nli, l_mrc;
  if (!yhat.empty()) {
    l_nli = nli_loss(yhat, labels).loss;
    rec.l_nli = double(l_nli->value().item());
  }
  if (!spans.empty()) {
    l_mrc = mrc_loss(spans, targets).loss;
    rec.l_mrc = double(l_mrc->value().item());
  }
  const auto total = joint_loss(l_nli, l_mrc, Real(tcfg.alpha), Real(tcfg.beta));
  rec.l_total = double(total.value().item());
  if (!std::isfinite(rec.l_total)) throw NumericError("non-finite joint loss");
  return total;
}

template <typename Real>
BatchGrad<Real> batch_gradient(const ParamStore<Real>& params, const ModelConfig& mcfg, const TrainConfig& tcfg,
                               const MixedDataset& data, const SamplingPlan& plan,
                               const std::vector<TaskSample>& batch) {
  ad::Tape<Real> tape;
  ParamBinder<Real> p(tape, params);
  BatchGrad<Real> out;
  const auto total = batch_loss(p, mcfg, tcfg, data, plan, batch, &out.record);
  const auto table = tape.backward(total);
  for (const auto& prm : params.items()) {
    auto it = table.find(prm.name);
    out.grads.push_back(it != table.end() ? it->second : Tensor<Real>(prm.value.rows(), prm.value.cols(), Real(0)));
  }
  return out;
}

std::vector<TaskSample> audit_batch(const SamplingPlan& plan) {
  std::vector<TaskSample> batch;
  if (plan.nli_size > 0) batch.push_back({TaskSample::Kind::nli, 0, 0});
  for (std::size_t j = 0; j < plan.sizes.size(); ++j) batch.push_back({TaskSample::Kind::mrc, j, 0});
  return batch;
}

GradCheckReport audit_gradients(const Config& cfg, const MixedDataset& data, const GradCheckOptions& opts) {
  cfg.model.validate();
  cfg.train.validate();
  const SamplingPlan plan = plan_for(data, cfg.train);
  const auto batch = audit_batch(plan);
  ParamStore<double> params = init_params<double>(cfg.model, cfg.train.seed);
  const LossBuilder build = [&](ParamBinder<double>& p) {
    return batch_loss(p, cfg.model, cfg.train, data, plan, batch, nullptr);
  };
  return grad_check(build, params, opts);
}

SamplingPlan plan_for(const MixedDataset& data, const TrainConfig& cfg) {
  std::vector<std::string> tags;
  std::vector<std::size_t> sizes;
  for (const auto& [tag, examples] : data.mrc) {
    tags.push_back(tag);
    sizes.push_back(examples.size());
  }
  return make_plan(std::move(tags), std::move(sizes), data.nli.size(), cfg.task_ratio,
                   cfg.seed ^ 0x5DEECE66DULL);
}

template <typename Real>
TrainResult<Real> train(const MixedDataset& data, const Config& cfg, const TrainHooks<Real>& hooks) {
  cfg.model.validate();
  cfg.train.validate();
  const TrainConfig& tc = cfg.train;
  const SamplingPlan plan = plan_for(data, tc);

  TrainResult<Real> run;
  run.params = init_params<Real>(cfg.model, tc.seed);
  AdamW<Real> opt(run.params, tc);
  std::vector<bool> frozen(run.params.size(), false);
  if (tc.freeze_embeddings) frozen[run.params.index_of("enc.tok_emb")] = true;

  Rng rng(plan.seed);
  const std::size_t total = data.total();
  const std::size_t steps_per_epoch = (total + tc.batch_size - 1) / tc.batch_size;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      ++step;
      const auto batch = sample_batch(plan, tc.batch_size, rng);
      BatchGrad<Real> bg;
      try {
        bg = batch_gradient(run.params, cfg.model, tc, data, plan, batch);
      } catch (const NumericError& e) {
        std::ostringstream os;
        os << "step " << step << " (epoch " << epoch << ", batch " << s + 1 << "): " << e.what();
        throw NumericError(os.str());
      }
      bg.record.step = step;
      if (hooks.on_step) hooks.on_step(bg.record, run.params, bg.grads);
      clip_global_norm(bg.grads, tc.clip_norm);
      opt.step(run.params, bg.grads, frozen);
      run.log.push_back(bg.record);
    }
    run.epochs_run = epoch;
    if (hooks.on_epoch && hooks.on_epoch(epoch, run.params)) break;
  }
  return run;
}

template <typename Real>
void save_run(const std::string& dir, const TrainResult<Real>& run, const Vocab& vocab, const Config& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  save_checkpoint((base / "checkpoint.bin").string(), run.params);
  vocab.save((base / "vocab.txt").string());
  {
    std::ofstream f(base / "config.cfg", std::ios::binary);
    f << config_to_text(cfg);
    if (!f) throw DataError("cannot write " + (base / "config.cfg").string());
  }
  std::ofstream f(base / "metrics.tsv", std::ios::binary);
  f << metrics_header() << '\n';
  for (const auto& r : run.log) f << format_step(r) << '\n';
  if (!f) throw DataError("cannot write " + (base / "metrics.tsv").string());
}

#define MRC_INSTANTIATE(Real)                                                                                     \
  template ad::Var<Real> joint_loss(const std::optional<ad::Var<Real>>&, const std::optional<ad::Var<Real>>&,     \
                                    Real, Real);                                                                  \
  template class AdamW<Real>;                                                                                     \
  template double clip_global_norm(std::vector<Tensor<Real>>&, double);                                          \
  template ad::Var<Real> batch_loss(ParamBinder<Real>&, const ModelConfig&, const TrainConfig&, const MixedDataset&, \
                                    const SamplingPlan&, const std::vector<TaskSample>&, StepRecord*);             \
  template BatchGrad<Real> batch_gradient(const ParamStore<Real>&, const ModelConfig&, const TrainConfig&,        \
                                          const MixedDataset&, const SamplingPlan&, const std::vector<TaskSample>&); \
  template TrainResult<Real> train(const MixedDataset&, const Config&, const TrainHooks<Real>&);                  \
  template void save_run(const std::string&, const TrainResult<Real>&, const Vocab&, const Config&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
