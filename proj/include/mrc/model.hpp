#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrc/dataset.hpp"
#include "mrc/nli_head.hpp"

namespace mrc {

// Parameter partition of the joint objective.
enum class ParamGroup { shared, mrc, nli };
ParamGroup param_group(const std::string& name);

// enc.* then mrc.* then nli.*, initialised from `seed`.
template <typename Real>
ParamStore<Real> init_params(const ModelConfig& cfg, std::uint64_t seed);

template <typename Real>
struct MrcForward {
  SpanOutput<Real> span;
  SpanTarget target;  // gold rows in the distribution
  std::vector<unsigned char> span_mask;
};

template <typename Real>
MrcForward<Real> forward_mrc(ParamBinder<Real>& p, const ModelConfig& cfg, const MrcExample& ex);

template <typename Real>
NliScore<Real> forward_nli(ParamBinder<Real>& p, const ModelConfig& cfg, const NliExample& ex);

// Forward-only span distribution for one example.
template <typename Real>
SpanDistribution predict_distribution(const ParamStore<Real>& params, const ModelConfig& cfg, const MrcExample& ex);

/// Elementwise mean of P_s and P_e over models of identical layout.
template <typename Real>
SpanDistribution ensemble_predict(const std::vector<const ParamStore<Real>*>& models, const ModelConfig& cfg,
                                  const MrcExample& ex);

// Decoded answer text.
template <typename Real>
std::string predict_answer(const std::vector<const ParamStore<Real>*>& models, const ModelConfig& cfg, const MrcExample& ex,
                           std::size_t max_answer_len);

}  // namespace mrc
