#pragma once

#include <vector>

#include "mrc/decoder.hpp"

namespace mrc {

// nli.w (d x 2), nli.b (1 x 2)
template <typename Real>
void add_nli_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng);

template <typename Real>
struct NliScore {
  ad::Var<Real> probs;  // 1 x 2, softmax(h_cls w + b)
  ad::Var<Real> yhat;   // 1 x 1, probability of class 1 (same meaning)
};

template <typename Real>
NliScore<Real> nli_score(ParamBinder<Real>& p, const ad::Var<Real>& h_cls);

// -(1/N) sum [y log yhat + (1 - y) log(1 - yhat)], logs floored at kLogFloor.
template <typename Real>
LossResult<Real> nli_loss(const std::vector<ad::Var<Real>>& yhat, const std::vector<int>& labels);

inline constexpr double kNliThreshold = 0.5;

}  // namespace mrc
