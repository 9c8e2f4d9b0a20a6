#include "mrc/decoder.hpp"

#include <cmath>

namespace mrc {

template <typename Real>
MemAttResult<Real> mem_att(const ad::Var<Real>& q, const ad::Var<Real>& k, const ad::Var<Real>& v,
                           const MemAttMasks* masks, AttentionMode mode) {
  const std::size_t rows = q.rows();
  const std::size_t d = q.cols();
  if (d == 0) throw ShapeError("mem_att: zero head width");
  if (k.rows() != rows || v.rows() != rows || k.cols() != d)
    throw ShapeError("mem_att: Q " + q.value().shape_string() + ", K " + k.value().shape_string() + ", V " +
                     v.value().shape_string() + " are incompatible");
  std::optional<Mask> key_mask, query_mask;
  if (masks) {
    if (masks->key_valid.size() != rows || masks->query_valid.size() != rows)
      throw ShapeError("mem_att: mask length differs from row count " + std::to_string(rows));
    key_mask = Mask::broadcast_columns(rows, masks->key_valid);
    query_mask = Mask::broadcast_columns(rows, masks->query_valid);
  }
  const Real inv_scale = Real(1) / std::sqrt(Real(d));
  MemAttResult<Real> r;
  r.q2k = ad::softmax_rows(ad::scale(ad::matmul_nt(q, k), inv_scale), key_mask ? &*key_mask : nullptr);
  if (mode == AttentionMode::memory) {
    r.k2q = ad::softmax_rows(ad::scale(ad::matmul_nt(k, q), inv_scale), query_mask ? &*query_mask : nullptr);
    r.combined = ad::add(r.q2k, r.k2q);
  } else {
    r.combined = r.q2k;
  }
  r.output = ad::matmul(r.combined, v);
  return r;
}

template <typename Real>
void add_decoder_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.d_model;
  const std::size_t dh = cfg.d_head();
  for (std::size_t l = 0; l < cfg.n_blocks; ++l) {
    const std::string pre = "mrc." + std::to_string(l);
    add_attention_params(store, pre + ".selfq", d, rng);
    add_attention_params(store, pre + ".selfp", d, rng);
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
      store.add(pre + ".mem.wq" + std::to_string(h), glorot<Real>(d, dh, rng));
      store.add(pre + ".mem.wk" + std::to_string(h), glorot<Real>(d, dh, rng));
    }
    store.add(pre + ".mem.wv", glorot<Real>(d, d, rng));
    store.add(pre + ".mem.wo", glorot<Real>(d, d, rng));
    add_layer_norm_params(store, pre + ".ln1", d);
    add_feed_forward_params(store, pre + ".ff", d, cfg.d_ff, rng);
    add_layer_norm_params(store, pre + ".ln2", d);
  }
  store.add("mrc.span.ws", glorot<Real>(1, d, rng));
  store.add("mrc.span.bs", Tensor<Real>(1, 1), false);
  store.add("mrc.span.we", glorot<Real>(1, d, rng));
  store.add("mrc.span.be", Tensor<Real>(1, 1), false);
}

template <typename Real>
ad::Var<Real> self_attend(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x,
                          const std::vector<unsigned char>& stream, std::size_t n_heads) {
  if (stream.size() != x.rows())
    throw ShapeError("self_attend: stream mask of length " + std::to_string(stream.size()) + " vs " +
                     std::to_string(x.rows()) + " rows");
  bool any = false;
  for (unsigned char s : stream) any = any || s;
  if (!any) throw DomainError("self_attend: stream has no positions");
  const Mask keys = Mask::broadcast_columns(x.rows(), stream);
  return ad::mask_rows(multi_head_self_attention(p, prefix, x, n_heads, &keys), stream);
}

template <typename Real>
ad::Var<Real> memory_guided_multihead(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& r_q,
                                      const ad::Var<Real>& r_p, const ad::Var<Real>& h_mem, const StreamMasks& masks,
                                      const ModelConfig& cfg) {
  const std::size_t rows = h_mem.rows();
  if (r_q.rows() != rows || r_p.rows() != rows)
    throw ShapeError("memory_guided_multihead: stream row counts differ from memory rows");
  const std::size_t dh = cfg.d_head();
  const MemAttMasks mm{masks.passage, masks.question};
  auto value = ad::matmul(h_mem, p(prefix + ".wv"));
  std::vector<ad::Var<Real>> heads;
  heads.reserve(cfg.n_heads);
  for (std::size_t h = 0; h < cfg.n_heads; ++h) {
    auto q = ad::matmul(r_q, p(prefix + ".wq" + std::to_string(h)));
    auto k = ad::matmul(r_p, p(prefix + ".wk" + std::to_string(h)));
    auto v = ad::slice_cols(value, h * dh, dh);
    heads.push_back(mem_att(q, k, v, &mm, cfg.attention).output);
  }
  auto joined = cfg.n_heads == 1 ? heads.front() : ad::concat_cols(heads);
  return ad::relu(ad::matmul(joined, p(prefix + ".wo")));
}

template <typename Real>
ad::Var<Real> run_blocks(ParamBinder<Real>& p, const ad::Var<Real>& h_q, const ad::Var<Real>& h_p,
                         const ad::Var<Real>& h_mem, const StreamMasks& masks, const ModelConfig& cfg) {
  if (cfg.n_blocks == 0) throw UsageError("run_blocks: need at least one block");
  const auto in_q = ad::mask_rows(h_q, masks.question);
  const auto in_p = ad::mask_rows(h_p, masks.passage);
  auto x_q = in_q;
  auto x_p = in_p;
  ad::Var<Real> y;
  for (std::size_t l = 0; l < cfg.n_blocks; ++l) {
    const std::string pre = "mrc." + std::to_string(l);
    if (cfg.block_input == BlockInputMode::reread) {
      x_q = in_q;
      x_p = in_p;
    }
    auto r_q = ad::add(x_q, self_attend(p, pre + ".selfq", x_q, masks.question, cfg.n_heads));
    auto r_p = ad::add(x_p, self_attend(p, pre + ".selfp", x_p, masks.passage, cfg.n_heads));
    auto o = memory_guided_multihead(p, pre + ".mem", r_q, r_p, h_mem, masks, cfg);
    auto z = apply_layer_norm(p, pre + ".ln1", ad::add(ad::add(r_q, r_p), o));
    y = apply_layer_norm(p, pre + ".ln2", ad::add(z, feed_forward(p, pre + ".ff", z)));
    x_q = ad::mask_rows(y, masks.question);
    x_p = ad::mask_rows(y, masks.passage);
  }
  return y;
}

template <typename Real>
SpanOutput<Real> span_distributions(ParamBinder<Real>& p, const ad::Var<Real>& o, const std::vector<unsigned char>& span_mask) {
  if (span_mask.size() != o.rows())
    throw ShapeError("span_distributions: mask length " + std::to_string(span_mask.size()) + " vs " +
                     std::to_string(o.rows()) + " rows");
  bool any = false;
  for (unsigned char s : span_mask) any = any || s;
  if (!any) throw DomainError("span_distributions: empty passage mask");
  const Mask m = Mask::broadcast_columns(1, span_mask);
  SpanOutput<Real> out;
  out.start = ad::softmax_rows(ad::add_bias(ad::matmul_nt(p("mrc.span.ws"), o), p("mrc.span.bs")), &m);
  out.end = ad::softmax_rows(ad::add_bias(ad::matmul_nt(p("mrc.span.we"), o), p("mrc.span.be")), &m);
  return out;
}

template <typename Real>
SpanDistribution to_distribution(const SpanOutput<Real>& out, const std::vector<unsigned char>& span_mask) {
  SpanDistribution d;
  const auto s = out.start.value().values();
  const auto e = out.end.value().values();
  d.start.assign(s.begin(), s.end());
  d.end.assign(e.begin(), e.end());
  bool found = false;
  for (std::size_t i = 0; i < span_mask.size(); ++i) {
    if (!span_mask[i]) continue;
    if (!found) d.passage_begin = i;
    d.passage_end = i;
    found = true;
  }
  if (!found) throw DomainError("to_distribution: empty passage mask");
  return d;
}

template <typename Real>
LossResult<Real> mrc_loss(const std::vector<SpanOutput<Real>>& outputs, const std::vector<SpanTarget>& targets) {
  if (outputs.empty() || outputs.size() != targets.size())
    throw ShapeError("mrc_loss: need one target per output (" + std::to_string(outputs.size()) + " outputs, " +
                     std::to_string(targets.size()) + " targets)");
  LossResult<Real> r;
  std::vector<ad::Var<Real>> terms;
  terms.reserve(2 * outputs.size());
  const Real floor = static_cast<Real>(kLogFloor);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& t = targets[i];
    if (t.start > t.end) throw DataError("mrc_loss: gold start after gold end");
    auto ps = ad::pick(outputs[i].start, 0, t.start);
    auto pe = ad::pick(outputs[i].end, 0, t.end);
    r.clipped = r.clipped || ps.value().item() < floor || pe.value().item() < floor;
    terms.push_back(ad::log(ps, std::optional<Real>(floor)));
    terms.push_back(ad::log(pe, std::optional<Real>(floor)));
  }
  r.loss = ad::scale(ad::add_scalars(terms), Real(-1) / Real(2 * outputs.size()));
  return r;
}

std::pair<std::size_t, std::size_t> decode_span(const SpanDistribution& dist, std::size_t max_answer_len) {
  if (dist.start.size() != dist.end.size() || dist.passage_end >= dist.start.size() || dist.passage_begin > dist.passage_end)
    throw ShapeError("decode_span: inconsistent distribution");
  if (max_answer_len == 0) throw UsageError("decode_span: max_answer_len must be >= 1");
  std::pair<std::size_t, std::size_t> best{dist.passage_begin, dist.passage_begin};
  double best_score = -1.0;
  for (std::size_t s = dist.passage_begin; s <= dist.passage_end; ++s) {
    const std::size_t last = std::min(dist.passage_end, s + max_answer_len - 1);
    for (std::size_t e = s; e <= last; ++e) {
      const double score = dist.start[s] * dist.end[e];
      if (score > best_score) {
        best_score = score;
        best = {s, e};
      }
    }
  }
  return best;
}

#define MRC_INSTANTIATE(Real)                                                                                         \
  template MemAttResult<Real> mem_att(const ad::Var<Real>&, const ad::Var<Real>&, const ad::Var<Real>&,              \
                                      const MemAttMasks*, AttentionMode);                                             \
  template void add_decoder_params(ParamStore<Real>&, const ModelConfig&, Rng&);                                      \
  template ad::Var<Real> self_attend(ParamBinder<Real>&, const std::string&, const ad::Var<Real>&,                    \
                                     const std::vector<unsigned char>&, std::size_t);                                 \
  template ad::Var<Real> memory_guided_multihead(ParamBinder<Real>&, const std::string&, const ad::Var<Real>&,        \
                                                 const ad::Var<Real>&, const ad::Var<Real>&, const StreamMasks&,      \
                                                 const ModelConfig&);                                                 \
  template ad::Var<Real> run_blocks(ParamBinder<Real>&, const ad::Var<Real>&, const ad::Var<Real>&,                   \
                                    const ad::Var<Real>&, const StreamMasks&, const ModelConfig&);                    \
  template SpanOutput<Real> span_distributions(ParamBinder<Real>&, const ad::Var<Real>&,                              \
                                               const std::vector<unsigned char>&);                                    \
  template SpanDistribution to_distribution(const SpanOutput<Real>&, const std::vector<unsigned char>&);             \
  template LossResult<Real> mrc_loss(const std::vector<SpanOutput<Real>>&, const std::vector<SpanTarget>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
