#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mrc/metrics.hpp"
#include "mrc/trainer.hpp"

namespace mrc {

// Named evaluation subsets, e.g. in_domain / paraphrase / adversarial.
using EvalSets = std::map<std::string, std::vector<MrcExample>>;

using Predictor = std::function<std::string(const MrcExample&)>;

// Runs `predict` over every example (in parallel when threads > 1) and scores
// in a fixed order, so the report does not depend on the thread count.
EvalReport evaluate_with(const std::string& dataset, const Predictor& predict, const EvalSets& sets,
                         std::size_t threads = 1);

/// Decodes with the averaged span distribution of `models`.
template <typename Real>
EvalReport evaluate(const std::string& dataset, const std::vector<const ParamStore<Real>*>& models,
                    const ModelConfig& cfg, const EvalSets& sets, std::size_t max_answer_len, std::size_t threads = 1);

// Throws DataError when a checkpoint's embedding table disagrees with the
// vocabulary size in `cfg`.
template <typename Real>
void check_vocab(const ParamStore<Real>& params, const ModelConfig& cfg);

enum class AblationVariant { full, no_nli, single_language, standard_attention };
const char* variant_name(AblationVariant v);
inline constexpr AblationVariant kAblationVariants[] = {AblationVariant::full, AblationVariant::no_nli,
                                                         AblationVariant::single_language,
                                                         AblationVariant::standard_attention};

// Config and data of one variant; every variant keeps the seed of `cfg`.
Config variant_config(const Config& cfg, AblationVariant v);
MixedDataset variant_data(const MixedDataset& data, AblationVariant v);

struct AblationRow {
  AblationVariant variant = AblationVariant::full;
  EvalReport report;
  double max_nli_grad = 0;  // largest |grad| on nli.* over all steps
  std::size_t steps = 0;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  const AblationRow& row(AblationVariant v) const;
  // variant, then EM/F1 per subset, tab separated
  std::string to_text() const;
  std::string to_kv() const;
};

AblationTable ablate(const Config& cfg, const MixedDataset& data, const EvalSets& sets, std::size_t threads = 1);

}  // namespace mrc
