#pragma once

#include <string>

#include "mrc/params.hpp"
#include "mrc/rng.hpp"

namespace mrc {

// Glorot-uniform matrix.
template <typename Real>
Tensor<Real> glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng);
template <typename Real>
Tensor<Real> uniform_tensor(std::size_t rows, std::size_t cols, double limit, Rng& rng);

// Parameter bundles registered under `prefix`:
//   attention:    .wq .wk .wv .wo (d x d)
//   feed-forward: .w1 (d x ff) .b1 .w2 (ff x d) .b2
//   layer norm:   .g .b
template <typename Real>
void add_attention_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d, Rng& rng);
template <typename Real>
void add_feed_forward_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d, std::size_t ff, Rng& rng);
template <typename Real>
void add_layer_norm_params(ParamStore<Real>& store, const std::string& prefix, std::size_t d);

// Standard multi-head scaled dot-product self-attention with output
// projection. `mask` (rows x rows) selects which keys each query may see.
template <typename Real>
ad::Var<Real> multi_head_self_attention(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x,
                                        std::size_t n_heads, const Mask* mask = nullptr);

// relu(x W1 + b1) W2 + b2
template <typename Real>
ad::Var<Real> feed_forward(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x);

template <typename Real>
ad::Var<Real> apply_layer_norm(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x);

}  // namespace mrc
