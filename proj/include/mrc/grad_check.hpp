#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrc/params.hpp"

namespace mrc {

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |a - n| / max(|a|, |n|, abs_floor), so coordinates
  // whose true gradient is ~0 are judged on absolute error.
  double abs_floor = 1e-6;
  // 0 probes every coordinate. Otherwise the largest-|gradient| coordinate
  // plus uniformly drawn others, up to this many per parameter.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 17;
};

struct GradCheckEntry {
  std::string name;
  std::size_t probed = 0;
  std::size_t worst_index = 0;
  double max_rel_error = 0.0;
  double analytic = 0.0;
  double numeric = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;
  bool passed = true;

  const GradCheckEntry& entry(const std::string& name) const;
  double worst() const;
  std::string to_text() const;
};

// Builds the scalar loss on the binder's tape from the current parameter
// values. Called once for the analytic gradient and twice per probed
// coordinate.
using LossBuilder = std::function<ad::Var<double>(ParamBinder<double>&)>;

/// Central finite-difference audit of every parameter in `params` (64-bit).
/// Parameter values are restored before returning.
GradCheckReport grad_check(const LossBuilder& build_loss, ParamStore<double>& params, const GradCheckOptions& opts = {});

}  // namespace mrc
