#include "mrc/encoder.hpp"

namespace mrc {

JointInput build_joint_input(const std::vector<std::size_t>& s_l, const std::vector<std::size_t>& s_r,
                             std::size_t max_len) {
  if (s_l.empty() || s_r.empty()) throw ShapeError("joint input needs non-empty left and right segments");
  const std::size_t m = s_l.size();
  if (m + 4 > max_len)
    throw ShapeError("left segment of " + std::to_string(m) + " tokens leaves no room under max length " +
                     std::to_string(max_len));
  JointInput in;
  in.m = m;
  in.n = std::min(s_r.size(), max_len - m - 3);
  if (in.n < s_r.size()) {
    in.dropped = s_r.size() - in.n;
    in.warning = "right segment truncated from " + std::to_string(s_r.size()) + " to " + std::to_string(in.n) + " tokens";
  }
  in.ids.push_back(Vocab::kCls);
  in.ids.insert(in.ids.end(), s_l.begin(), s_l.end());
  in.ids.push_back(Vocab::kSep);
  in.ids.insert(in.ids.end(), s_r.begin(), s_r.begin() + static_cast<std::ptrdiff_t>(in.n));
  in.ids.push_back(Vocab::kSep);
  for (std::size_t i = 0; i < in.ids.size(); ++i) {
    in.positions.push_back(i);
    in.segments.push_back(i <= m + 1 ? 0 : 1);
  }
  return in;
}

StreamMasks stream_masks(std::size_t m, std::size_t n) {
  const std::size_t rows = m + n + 2;
  StreamMasks s;
  s.question.assign(rows, 0);
  s.passage.assign(rows, 0);
  s.span.assign(rows, 0);
  for (std::size_t i = 0; i <= m; ++i) s.question[i] = 1;
  for (std::size_t i = m + 1; i < rows; ++i) s.passage[i] = 1;
  for (std::size_t i = m + 1; i < rows - 1; ++i) s.span[i] = 1;
  return s;
}

template <typename Real>
void add_encoder_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.d_model;
  if (cfg.vocab_size == 0) throw UsageError("model config has vocab_size 0");
  store.add("enc.tok_emb", uniform_tensor<Real>(cfg.vocab_size, d, 0.1, rng));
  store.add("enc.seg_emb", uniform_tensor<Real>(2, d, 0.1, rng));
  store.add("enc.pos_emb", uniform_tensor<Real>(cfg.max_seq_len, d, 0.1, rng));
  for (std::size_t l = 0; l < cfg.encoder_blocks; ++l) {
    const std::string pre = "enc." + std::to_string(l);
    add_attention_params(store, pre + ".attn", d, rng);
    add_layer_norm_params(store, pre + ".ln1", d);
    add_feed_forward_params(store, pre + ".ff", d, cfg.d_ff, rng);
    add_layer_norm_params(store, pre + ".ln2", d);
  }
}

template <typename Real>
ad::Var<Real> encode(ParamBinder<Real>& p, const ModelConfig& cfg, const JointInput& input) {
  if (input.length() > cfg.max_seq_len)
    throw ShapeError("input of length " + std::to_string(input.length()) + " exceeds max_seq_len");
  for (std::size_t id : input.ids)
    if (id >= cfg.vocab_size)
      throw ShapeError("token id " + std::to_string(id) + " out of range for vocabulary of " + std::to_string(cfg.vocab_size));
  auto x = ad::add(ad::add(ad::gather_rows(p("enc.tok_emb"), input.ids), ad::gather_rows(p("enc.seg_emb"), input.segments)),
                   ad::gather_rows(p("enc.pos_emb"), input.positions));
  for (std::size_t l = 0; l < cfg.encoder_blocks; ++l) {
    const std::string pre = "enc." + std::to_string(l);
    x = apply_layer_norm(p, pre + ".ln1", ad::add(x, multi_head_self_attention(p, pre + ".attn", x, cfg.encoder_heads)));
    x = apply_layer_norm(p, pre + ".ln2", ad::add(x, feed_forward(p, pre + ".ff", x)));
  }
  return x;
}

template <typename Real>
EncodedPair<Real> split_pad(const ad::Var<Real>& h_full, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0 || h_full.rows() != m + n + 3)
    throw ShapeError("split_pad: H has " + std::to_string(h_full.rows()) + " rows, expected m+n+3 = " +
                     std::to_string(m + n + 3));
  EncodedPair<Real> out;
  out.m = m;
  out.n = n;
  out.h_full = h_full;
  out.h_cls = ad::slice_rows(h_full, 0, 1);
  out.masks = stream_masks(m, n);
  auto tail = ad::slice_rows(h_full, 1, m + n + 2);
  out.h_q = ad::mask_rows(tail, out.masks.question);
  out.h_p = ad::mask_rows(tail, out.masks.passage);
  out.h_mem = ad::add(out.h_q, out.h_p);
  return out;
}

#define MRC_INSTANTIATE(Real)                                                                         \
  template void add_encoder_params(ParamStore<Real>&, const ModelConfig&, Rng&);                      \
  template ad::Var<Real> encode(ParamBinder<Real>&, const ModelConfig&, const JointInput&);           \
  template EncodedPair<Real> split_pad(const ad::Var<Real>&, std::size_t, std::size_t);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
