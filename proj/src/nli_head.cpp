#include "mrc/nli_head.hpp"

namespace mrc {

template <typename Real>
void add_nli_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng) {
  store.add("nli.w", glorot<Real>(cfg.d_model, 2, rng));
  store.add("nli.b", Tensor<Real>(1, 2), false);
}

template <typename Real>
NliScore<Real> nli_score(ParamBinder<Real>& p, const ad::Var<Real>& h_cls) {
  if (h_cls.rows() != 1) throw ShapeError("nli_score: h_cls must be a single row");
  NliScore<Real> s;
  s.probs = ad::softmax_rows(ad::add_bias(ad::matmul(h_cls, p("nli.w")), p("nli.b")));
  s.yhat = ad::pick(s.probs, 0, 1);
  return s;
}

template <typename Real>
LossResult<Real> nli_loss(const std::vector<ad::Var<Real>>& yhat, const std::vector<int>& labels) {
  if (yhat.empty() || yhat.size() != labels.size())
    throw ShapeError("nli_loss: need one label per prediction");
  const Real floor = static_cast<Real>(kLogFloor);
  LossResult<Real> r;
  std::vector<ad::Var<Real>> terms;
  terms.reserve(yhat.size());
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("nli_loss: label must be 0 or 1");
    // label 1 scores yhat, label 0 scores 1 - yhat
    auto p = labels[i] == 1 ? yhat[i] : ad::scale_shift(yhat[i], Real(-1), Real(1));
    r.clipped = r.clipped || p.value().item() < floor;
    terms.push_back(ad::log(p, std::optional<Real>(floor)));
  }
  r.loss = ad::scale(ad::add_scalars(terms), Real(-1) / Real(yhat.size()));
  return r;
}

#define MRC_INSTANTIATE(Real)                                                                         \
  template void add_nli_params(ParamStore<Real>&, const ModelConfig&, Rng&);                          \
  template NliScore<Real> nli_score(ParamBinder<Real>&, const ad::Var<Real>&);                        \
  template LossResult<Real> nli_loss(const std::vector<ad::Var<Real>>&, const std::vector<int>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
