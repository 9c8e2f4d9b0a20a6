#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mrc/rng.hpp"

namespace mrc {

/// Probability of MRC sub-dataset j = size_j / sum(sizes).
std::vector<double> compute_sampling_probs(const std::vector<std::size_t>& sizes);

struct SamplingPlan {
  std::vector<std::string> tags;     // MRC sub-dataset per index
  std::vector<std::size_t> sizes;
  std::vector<double> probs;         // sums to 1
  std::size_t nli_size = 0;
  double task_ratio = 0.5;           // P(slot draws NLI) when NLI data exists
  std::uint64_t seed = 0;
};

SamplingPlan make_plan(std::vector<std::string> tags, std::vector<std::size_t> sizes, std::size_t nli_size,
                       double task_ratio, std::uint64_t seed);

struct TaskSample {
  enum class Kind { nli, mrc };
  Kind kind = Kind::mrc;
  std::size_t subset = 0;  // MRC sub-dataset index; 0 for NLI
  std::size_t index = 0;   // position within the chosen dataset

  friend bool operator==(const TaskSample&, const TaskSample&) = default;
};

// Each slot independently picks a task, then (for MRC) a sub-dataset by the
// plan's probabilities, then a uniform sample with replacement.
std::vector<TaskSample> sample_batch(const SamplingPlan& plan, std::size_t batch_size, Rng& rng);

}  // namespace mrc
