#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrc/grad_check.hpp"
#include "mrc/model.hpp"
#include "mrc/sampler.hpp"
#include "mrc/text.hpp"

namespace mrc {

/// alpha * L_NLI + beta * L_MRC; an absent part contributes 0.
double joint_loss(std::optional<double> nli, std::optional<double> mrc, double alpha, double beta);
template <typename Real>
ad::Var<Real> joint_loss(const std::optional<ad::Var<Real>>& nli, const std::optional<ad::Var<Real>>& mrc, Real alpha,
                         Real beta);

/// Decoupled-weight-decay Adam.
template <typename Real>
class AdamW {
 public:
  AdamW(const ParamStore<Real>& params, const TrainConfig& cfg);

  // `grads` must be aligned with the store order. Parameters in `frozen`
  // (by index) are left untouched.
  void step(ParamStore<Real>& params, const std::vector<Tensor<Real>>& grads, const std::vector<bool>& frozen);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::size_t t_ = 0;
  std::vector<Tensor<Real>> m_, v_;
};

// Rescales grads in place so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
template <typename Real>
double clip_global_norm(std::vector<Tensor<Real>>& grads, double max_norm);

struct StepRecord {
  std::size_t step = 0;
  std::size_t n_nli = 0;
  std::size_t n_mrc = 0;
  std::optional<double> l_nli;
  std::optional<double> l_mrc;
  double l_total = 0;
};

// step \t task_mix \t L_NLI \t L_MRC \t L_total
std::string format_step(const StepRecord& r);
std::string metrics_header();

template <typename Real>
struct TrainHooks {
  // After backward, before clipping; grads aligned with the store order.
  std::function<void(const StepRecord&, const ParamStore<Real>&, const std::vector<Tensor<Real>>&)> on_step;
  // After each epoch (1-based); return true to stop early.
  std::function<bool(std::size_t, const ParamStore<Real>&)> on_epoch;
};

template <typename Real>
struct TrainResult {
  ParamStore<Real> params;
  std::vector<StepRecord> log;
  std::size_t epochs_run = 0;
};

// Joint loss of one batch on the binder's tape; fills `record` when given.
template <typename Real>
ad::Var<Real> batch_loss(ParamBinder<Real>& p, const ModelConfig& mcfg, const TrainConfig& tcfg,
                         const MixedDataset& data, const SamplingPlan& plan, const std::vector<TaskSample>& batch,
                         StepRecord* record = nullptr);

// One batch: forward every sample on a single tape, joint loss, backward.
template <typename Real>
struct BatchGrad {
  StepRecord record;
  std::vector<Tensor<Real>> grads;  // store order; zeros for unreached params
};
template <typename Real>
BatchGrad<Real> batch_gradient(const ParamStore<Real>& params, const ModelConfig& mcfg, const TrainConfig& tcfg,
                               const MixedDataset& data, const SamplingPlan& plan, const std::vector<TaskSample>& batch);

SamplingPlan plan_for(const MixedDataset& data, const TrainConfig& cfg);

// First NLI pair (if any) plus the first sample of every MRC sub-dataset.
std::vector<TaskSample> audit_batch(const SamplingPlan& plan);

/// Finite-difference audit of the freshly initialised full model (64-bit) on
/// the joint loss of audit_batch().
GradCheckReport audit_gradients(const Config& cfg, const MixedDataset& data, const GradCheckOptions& opts);

/// Sample -> batch -> step loop for cfg.train.epochs epochs of
/// ceil(total / batch_size) steps. Deterministic for a fixed seed.
template <typename Real>
TrainResult<Real> train(const MixedDataset& data, const Config& cfg, const TrainHooks<Real>& hooks = {});

// Writes checkpoint.bin, vocab.txt, config.cfg and metrics.tsv into `dir`.
template <typename Real>
void save_run(const std::string& dir, const TrainResult<Real>& run, const Vocab& vocab, const Config& cfg);

}  // namespace mrc
