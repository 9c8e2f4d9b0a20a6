#include "mrc/model.hpp"

namespace mrc {

ParamGroup param_group(const std::string& name) {
  if (name.rfind("enc.", 0) == 0) return ParamGroup::shared;
  if (name.rfind("mrc.", 0) == 0) return ParamGroup::mrc;
  if (name.rfind("nli.", 0) == 0) return ParamGroup::nli;
  throw UsageError("parameter outside every group: " + name);
}

template <typename Real>
ParamStore<Real> init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ParamStore<Real> store;
  add_encoder_params(store, cfg, rng);
  add_decoder_params(store, cfg, rng);
  add_nli_params(store, cfg, rng);
  return store;
}

template <typename Real>
MrcForward<Real> forward_mrc(ParamBinder<Real>& p, const ModelConfig& cfg, const MrcExample& ex) {
  const JointInput in = build_joint_input(ex.question_ids, ex.passage_ids, cfg.max_seq_len);
  const EncodedPair<Real> enc = encode_pair(p, cfg, in);
  auto o = run_blocks(p, enc.h_q, enc.h_p, enc.h_mem, enc.masks, cfg);
  MrcForward<Real> f;
  f.span = span_distributions(p, o, enc.masks.span);
  f.span_mask = enc.masks.span;
  f.target = {in.m + 1 + ex.start_token, in.m + 1 + ex.end_token};
  return f;
}

template <typename Real>
NliScore<Real> forward_nli(ParamBinder<Real>& p, const ModelConfig& cfg, const NliExample& ex) {
  const JointInput in = build_joint_input(ex.s1, ex.s2, cfg.max_seq_len);
  return nli_score(p, ad::slice_rows(encode(p, cfg, in), 0, 1));
}

template <typename Real>
SpanDistribution predict_distribution(const ParamStore<Real>& params, const ModelConfig& cfg, const MrcExample& ex) {
  ad::Tape<Real> tape;
  ParamBinder<Real> p(tape, params);
  const auto f = forward_mrc(p, cfg, ex);
  SpanDistribution d = to_distribution(f.span, f.span_mask);
  d.gold_start = f.target.start;
  d.gold_end = f.target.end;
  return d;
}

template <typename Real>
SpanDistribution ensemble_predict(const std::vector<const ParamStore<Real>*>& models, const ModelConfig& cfg,
                                  const MrcExample& ex) {
  if (models.empty()) throw UsageError("ensemble_predict: no models");
  for (const auto* m : models)
    if (!m->same_layout(*models.front())) throw ShapeError("ensemble_predict: architecture mismatch between models");
  SpanDistribution acc = predict_distribution(*models.front(), cfg, ex);
  for (std::size_t k = 1; k < models.size(); ++k) {
    const SpanDistribution d = predict_distribution(*models[k], cfg, ex);
    for (std::size_t i = 0; i < acc.start.size(); ++i) {
      acc.start[i] += d.start[i];
      acc.end[i] += d.end[i];
    }
  }
  const double inv = 1.0 / double(models.size());
  for (std::size_t i = 0; i < acc.start.size(); ++i) {
    acc.start[i] *= inv;
    acc.end[i] *= inv;
  }
  return acc;
}

template <typename Real>
std::string predict_answer(const std::vector<const ParamStore<Real>*>& models, const ModelConfig& cfg, const MrcExample& ex,
                           std::size_t max_answer_len) {
  const SpanDistribution d = ensemble_predict(models, cfg, ex);
  const auto [s, e] = decode_span(d, max_answer_len);
  return span_text(ex, s - d.passage_begin, e - d.passage_begin);
}

#define MRC_INSTANTIATE(Real)                                                                                         \
  template ParamStore<Real> init_params<Real>(const ModelConfig&, std::uint64_t);                                     \
  template MrcForward<Real> forward_mrc(ParamBinder<Real>&, const ModelConfig&, const MrcExample&);                   \
  template NliScore<Real> forward_nli(ParamBinder<Real>&, const ModelConfig&, const NliExample&);                     \
  template SpanDistribution predict_distribution(const ParamStore<Real>&, const ModelConfig&, const MrcExample&);     \
  template SpanDistribution ensemble_predict(const std::vector<const ParamStore<Real>*>&, const ModelConfig&,         \
                                             const MrcExample&);                                                      \
  template std::string predict_answer(const std::vector<const ParamStore<Real>*>&, const ModelConfig&,                \
                                      const MrcExample&, std::size_t);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
