#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mrc/config.hpp"
#include "mrc/layers.hpp"
#include "mrc/text.hpp"

namespace mrc {

/// Token ids laid out as <CLS> S_l <Sp> S_r <Sp>.
struct JointInput {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> segments;   // 0 through the first <Sp>, 1 after
  std::vector<std::size_t> positions;
  std::size_t m = 0;  // |S_l|
  std::size_t n = 0;  // |S_r| after truncation
  std::size_t dropped = 0;  // S_r tokens removed to fit max_len
  std::string warning;

  std::size_t length() const { return ids.size(); }
};

// Truncates S_r (with a warning record) when m + n + 3 > max_len. Throws
// ShapeError when S_l or S_r is empty, or S_l alone leaves no room for S_r.
JointInput build_joint_input(const std::vector<std::size_t>& s_l, const std::vector<std::size_t>& s_r,
                             std::size_t max_len);

/// Position masks over the m + n + 2 non-<CLS> rows.
struct StreamMasks {
  std::vector<unsigned char> question;  // S_l tokens and the first <Sp>: rows 0..m
  std::vector<unsigned char> passage;   // S_r tokens and the final <Sp>: rows m+1..m+n+1
  std::vector<unsigned char> span;      // S_r tokens only: rows m+1..m+n
};
StreamMasks stream_masks(std::size_t m, std::size_t n);

template <typename Real>
struct EncodedPair {
  ad::Var<Real> h_full;  // (m+n+3) x d
  ad::Var<Real> h_cls;   // 1 x d, row 0 of h_full
  ad::Var<Real> h_q;     // (m+n+2) x d, zero outside the question rows
  ad::Var<Real> h_p;     // (m+n+2) x d, zero outside the passage rows
  ad::Var<Real> h_mem;   // h_q + h_p
  StreamMasks masks;
  std::size_t m = 0;
  std::size_t n = 0;
};

// Registers enc.* parameters: token/segment/position embeddings followed by
// encoder_blocks post-norm self-attention blocks.
template <typename Real>
void add_encoder_params(ParamStore<Real>& store, const ModelConfig& cfg, Rng& rng);

// Returns H_full; h_CLS is its row 0.
template <typename Real>
ad::Var<Real> encode(ParamBinder<Real>& p, const ModelConfig& cfg, const JointInput& input);

template <typename Real>
EncodedPair<Real> split_pad(const ad::Var<Real>& h_full, std::size_t m, std::size_t n);

template <typename Real>
EncodedPair<Real> encode_pair(ParamBinder<Real>& p, const ModelConfig& cfg, const JointInput& input) {
  return split_pad(encode(p, cfg, input), input.m, input.n);
}

}  // namespace mrc
