#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mrc/config.hpp"
#include "mrc/encoder.hpp"

namespace mrc {

// ---------------------------------------------------------------------------
// Memory-guided attention unit.
//
//   MemAtt(Q, K, V) = [softmax(Q K^T / sqrt(d)) + softmax(K Q^T / sqrt(d))] V
//
// Q holds question-side rows and K passage-side rows. `key_valid` restricts
// the columns of the query-to-key term (which keys a row may attend to) and
// `query_valid` those of the key-to-query term.

struct MemAttMasks {
  std::vector<unsigned char> key_valid;
  std::vector<unsigned char> query_valid;
};

template <typename Real>
struct MemAttResult {
  ad::Var<Real> output;
  ad::Var<Real> q2k;       // softmax(Q K^T / sqrt(d))
  ad::Var<Real> k2q;       // softmax(K Q^T / sqrt(d)); empty in standard mode
  ad::Var<Real> combined;  // q2k + k2q (or q2k alone in standard mode)
};

template <typename Real>
MemAttResult<Real> mem_att(const ad::Var<Real>& q, const ad::Var<Real>& k, const ad::Var<Real>& v,
                           const MemAttMasks* masks = nullptr, AttentionMode mode = AttentionMode::memory);

// ---------------------------------------------------------------------------
// Decoder parameters, registered under mrc.*:
//   mrc.<l>.selfq / .selfp   per-stream self-attention
//   mrc.<l>.mem.wq<i>, .wk<i> per-head query/key projections (d x d_head)
//   mrc.<l>.mem.wv, .wo       memory projection and output projection (d x d)
//   mrc.<l>.ln1, .ff, .ln2    interaction norm, feed-forward sublayer, norm
//   mrc.span.ws/bs/we/be      span output layer
template <typename Real>
void add_decoder_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng);

// Multi-head self-attention over one stream: keys limited to the stream's
// rows, output rows outside the stream zeroed. Throws on an empty stream.
template <typename Real>
ad::Var<Real> self_attend(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& x,
                          const std::vector<unsigned char>& stream, std::size_t n_heads);

// O = ReLU(Concat(head_1..head_h) W^O),
// head_i = MemAtt(R_Q W_i^Q, R_P W_i^K, slice_i(H_mem W^V)).
template <typename Real>
ad::Var<Real> memory_guided_multihead(ParamBinder<Real>& p, const std::string& prefix, const ad::Var<Real>& r_q,
                                      const ad::Var<Real>& r_p, const ad::Var<Real>& h_mem, const StreamMasks& masks,
                                      const ModelConfig& cfg);

// N computation blocks. H_mem feeds the memory projection of every block.
template <typename Real>
ad::Var<Real> run_blocks(ParamBinder<Real>& p, const ad::Var<Real>& h_q, const ad::Var<Real>& h_p,
                         const ad::Var<Real>& h_mem, const StreamMasks& masks, const ModelConfig& cfg);

// ---------------------------------------------------------------------------
// Span output.

template <typename Real>
struct SpanOutput {
  ad::Var<Real> start;  // 1 x (m+n+2)
  ad::Var<Real> end;
};

template <typename Real>
SpanOutput<Real> span_distributions(ParamBinder<Real>& p, const ad::Var<Real>& o, const std::vector<unsigned char>& span_mask);

/// Plain probability vectors with the passage-token range they live on.
struct SpanDistribution {
  std::vector<double> start;
  std::vector<double> end;
  std::size_t passage_begin = 0;  // first passage-token row
  std::size_t passage_end = 0;    // last passage-token row (inclusive)
  std::optional<std::size_t> gold_start;
  std::optional<std::size_t> gold_end;
};

template <typename Real>
SpanDistribution to_distribution(const SpanOutput<Real>& out, const std::vector<unsigned char>& span_mask);

struct SpanTarget {
  std::size_t start = 0;  // row index into the distribution
  std::size_t end = 0;
};

inline constexpr double kLogFloor = 1e-12;

template <typename Real>
struct LossResult {
  ad::Var<Real> loss;
  bool clipped = false;  // some probability fell under the log floor
};

// -(1/2M) sum_i [log P_s(s_i) + log P_e(e_i)]
template <typename Real>
LossResult<Real> mrc_loss(const std::vector<SpanOutput<Real>>& outputs, const std::vector<SpanTarget>& targets);

/// argmax over s <= e, e - s + 1 <= max_answer_len, inside the passage range,
/// of P_s(s) * P_e(e). Ties go to the smallest s, then the smallest e.
std::pair<std::size_t, std::size_t> decode_span(const SpanDistribution& dist, std::size_t max_answer_len);

}  // namespace mrc
