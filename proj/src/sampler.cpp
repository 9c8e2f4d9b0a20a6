#include "mrc/sampler.hpp"

#include "mrc/errors.hpp"

namespace mrc {

std::vector<double> compute_sampling_probs(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw DataError("no MRC sub-datasets");
  double total = 0;
  for (std::size_t s : sizes) {
    if (s == 0) throw DataError("empty MRC sub-dataset");
    total += double(s);
  }
  std::vector<double> p;
  p.reserve(sizes.size());
  for (std::size_t s : sizes) p.push_back(double(s) / total);
  return p;
}

SamplingPlan make_plan(std::vector<std::string> tags, std::vector<std::size_t> sizes, std::size_t nli_size,
                       double task_ratio, std::uint64_t seed) {
  if (tags.size() != sizes.size()) throw UsageError("make_plan: one tag per sub-dataset");
  if (task_ratio < 0 || task_ratio > 1) throw UsageError("make_plan: task_ratio outside [0, 1]");
  SamplingPlan plan;
  plan.probs = compute_sampling_probs(sizes);
  plan.tags = std::move(tags);
  plan.sizes = std::move(sizes);
  plan.nli_size = nli_size;
  plan.task_ratio = task_ratio;
  plan.seed = seed;
  return plan;
}

std::vector<TaskSample> sample_batch(const SamplingPlan& plan, std::size_t batch_size, Rng& rng) {
  if (plan.probs.empty() || plan.probs.size() != plan.sizes.size()) throw UsageError("sample_batch: invalid plan");
  std::vector<TaskSample> batch;
  batch.reserve(batch_size);
  for (std::size_t slot = 0; slot < batch_size; ++slot) {
    TaskSample s;
    // one uniform per slot for the task choice, even without NLI data
    const bool pick_nli = rng.uniform() < plan.task_ratio;
    if (pick_nli && plan.nli_size > 0) {
      s.kind = TaskSample::Kind::nli;
      s.index = rng.index(plan.nli_size);
    } else {
      const double u = rng.uniform();
      double cum = 0;
      s.subset = plan.probs.size() - 1;
      for (std::size_t j = 0; j < plan.probs.size(); ++j) {
        cum += plan.probs[j];
        if (u < cum) {
          s.subset = j;
          break;
        }
      }
      s.index = rng.index(plan.sizes[s.subset]);
    }
    batch.push_back(s);
  }
  return batch;
}

}  // namespace mrc
