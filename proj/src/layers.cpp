#include "mrc/layers.hpp"

#include <cmath>

namespace mrc {

template <typename Real>
Tensor<Real> uniform_tensor(std::size_t rows, std::size_t cols, double limit, Rng& rng) {
  Tensor<Real> t(rows, cols);
  for (Real& v : t.values()) v = static_cast<Real>(rng.uniform(-limit, limit));
  return t;
}

template <typename Real>
Tensor<Real> glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  return uniform_tensor<Real>(fan_in, fan_out, std::sqrt(6.0 / double(fan_in + fan_out)), rng);
}

template <typename Real>
void add_attention_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d, Rng& rng) {
  for (const char* w : {".wq", ".wk", ".wv", ".wo"}) store.add(prefix + w, glorot<Real>(d, d, rng));
}

template <typename Real>
void add_feed_forward_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d, std::size_t ff, Rng& rng) {
  store.add(prefix + ".w1", glorot<Real>(d, ff, rng));
  store.add(prefix + ".b1", Tensor<Real>(1, ff), false);
  store.add(prefix + ".w2", glorot<Real>(ff, d, rng));
  store.add(prefix + ".b2", Tensor<Real>(1, d), false);
}

template <typename Real>
void add_layer_norm_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d) {
  store.add(prefix + ".g", Tensor<Real>(1, d, Real(1)), false);
  store.add(prefix + ".b", Tensor<Real>(1, d), false);
}

template <typename Real>
ad::Var<Real> multi_head_self_attention(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x,
                                        std::size_t n_heads, const Mask* mask) {
  const std::size_t d = x.cols();
  if (n_heads == 0 || d % n_heads != 0) throw ShapeError("attention: head count must divide width " + std::to_string(d));
  const std::size_t dh = d / n_heads;
  const Real inv_scale = Real(1) / std::sqrt(Real(dh));
  auto q = ad::matmul(x, p(prefix + ".wq"));
  auto k = ad::matmul(x, p(prefix + ".wk"));
  auto v = ad::matmul(x, p(prefix + ".wv"));
  std::vector<ad::Var<Real>> heads;
  heads.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    auto qh = ad::slice_cols(q, h * dh, dh);
    auto kh = ad::slice_cols(k, h * dh, dh);
    auto vh = ad::slice_cols(v, h * dh, dh);
    auto weights = ad::softmax_rows(ad::scale(ad::matmul_nt(qh, kh), inv_scale), mask);
    heads.push_back(ad::matmul(weights, vh));
  }
  auto joined = n_heads == 1 ? heads.front() : ad::concat_cols(heads);
  return ad::matmul(joined, p(prefix + ".wo"));
}

template <typename Real>
ad::Var<Real> feed_forward(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x) {
  auto hidden = ad::relu(ad::add_bias(ad::matmul(x, p(prefix + ".w1")), p(prefix + ".b1")));
  return ad::add_bias(ad::matmul(hidden, p(prefix + ".w2")), p(prefix + ".b2"));
}

template <typename Real>
ad::Var<Real> apply_layer_norm(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x) {
  return ad::layer_norm(x, p(prefix + ".g"), p(prefix + ".b"));
}

#define MRC_INSTANTIATE(Real)                                                                                      \
  template Tensor<Real> uniform_tensor<Real>(std::size_t, std::size_t, double, Rng&);                              \
  template Tensor<Real> glorot<Real>(std::size_t, std::size_t, Rng&);                                              \
  template void add_attention_params(ParamStore<Real>&, const std::string&, std::size_t, Rng&);                    \
  template void add_feed_forward_params(ParamStore<Real>&, const std::string&, std::size_t, std::size_t, Rng&);    \
  template void add_layer_norm_params(ParamStore<Real>&, const std::string&, std::size_t);                         \
  template ad::Var<Real> multi_head_self_attention(ParamBinder<Real>&, const std::string&, const ad::Var<Real>&,   \
                                                   std::size_t, const Mask*);                                      \
  template ad::Var<Real> feed_forward(ParamBinder<Real>&, const std::string&, const ad::Var<Real>&);               \
  template ad::Var<Real> apply_layer_norm(ParamBinder<Real>&, const std::string&, const ad::Var<Real>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
