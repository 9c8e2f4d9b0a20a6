#include "mrc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

#include "mrc/errors.hpp"

namespace mrc {

EvalReport evaluate_with(const std::string& dataset, const Predictor& predict, const EvalSets& sets,
                         std::size_t threads) {
  std::vector<std::pair<std::string, const MrcExample*>> items;
  for (const auto& [name, examples] : sets)
    for (const auto& ex : examples) items.emplace_back(name, &ex);

  std::vector<std::string> predictions(items.size());
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(items.size(), 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) predictions[i] = predict(*items[i].second);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < items.size(); i += threads) predictions[i] = predict(*items[i].second);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<ScoredSample> scored;
  scored.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    scored.push_back({items[i].first, std::move(predictions[i]), items[i].second->gold_answers});
  return score_predictions(dataset, scored);
}

template <typename Real>
void check_vocab(const ParamStore<Real>& params, const ModelConfig& cfg) {
  const auto& emb = params.at("enc.tok_emb");
  if (emb.rows() != cfg.vocab_size) {
    throw DataError("vocabulary mismatch: checkpoint has " + std::to_string(emb.rows()) + " token embeddings, vocab has " +
                    std::to_string(cfg.vocab_size));
  }
}

template <typename Real>
EvalReport evaluate(const std::string& dataset, const std::vector<const ParamStore<Real>*>& models,
                    const ModelConfig& cfg, const EvalSets& sets, std::size_t max_answer_len, std::size_t threads) {
  if (models.empty()) throw UsageError("evaluate: no models");
  for (const auto* m : models) check_vocab(*m, cfg);
  const Predictor predict = [&](const MrcExample& ex) { return predict_answer(models, cfg, ex, max_answer_len); };
  return evaluate_with(dataset, predict, sets, threads);
}

const char* variant_name(AblationVariant v) {
  switch (v) {
    case AblationVariant::full: return "full";
    case AblationVariant::no_nli: return "no_nli";
    case AblationVariant::single_language: return "single_language";
    case AblationVariant::standard_attention: return "standard_attention";
  }
  return "?";
}

Config variant_config(const Config& cfg, AblationVariant v) {
  Config out = cfg;
  if (v == AblationVariant::no_nli) out.train.alpha = 0;
  if (v == AblationVariant::standard_attention) out.model.attention = AttentionMode::standard;
  return out;
}

MixedDataset variant_data(const MixedDataset& data, AblationVariant v) {
  if (v != AblationVariant::single_language || data.mrc.size() <= 1) return data;
  MixedDataset out;
  out.nli = data.nli;
  out.mrc.insert(*data.mrc.begin());
  return out;
}

const AblationRow& AblationTable::row(AblationVariant v) const {
  for (const auto& r : rows)
    if (r.variant == v) return r;
  throw UsageError(std::string("ablation table has no row ") + variant_name(v));
}

std::string AblationTable::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "variant\tall.EM\tall.F1";
  if (!rows.empty())
    for (const auto& s : rows.front().report.subsets) os << '\t' << s.name << ".EM\t" << s.name << ".F1";
  os << '\n';
  for (const auto& r : rows) {
    os << variant_name(r.variant) << '\t' << r.report.em << '\t' << r.report.f1;
    for (const auto& s : r.report.subsets) os << '\t' << s.em << '\t' << s.f1;
    os << '\n';
  }
  return os.str();
}

std::string AblationTable::to_kv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& r : rows) {
    const std::string v = variant_name(r.variant);
    os << v << ".all.em=" << r.report.em << '\n' << v << ".all.f1=" << r.report.f1 << '\n';
    for (const auto& s : r.report.subsets)
      os << v << '.' << s.name << ".em=" << s.em << '\n' << v << '.' << s.name << ".f1=" << s.f1 << '\n';
    os << v << ".max_nli_grad=" << r.max_nli_grad << '\n' << v << ".steps=" << r.steps << '\n';
  }
  return os.str();
}

AblationTable ablate(const Config& cfg, const MixedDataset& data, const EvalSets& sets, std::size_t threads) {
  AblationTable table;
  for (AblationVariant v : kAblationVariants) {
    const Config vc = variant_config(cfg, v);
    const MixedDataset vd = variant_data(data, v);
    AblationRow row;
    row.variant = v;
    TrainHooks<float> hooks;
    hooks.on_step = [&](const StepRecord&, const ParamStore<float>& params, const std::vector<Tensor<float>>& grads) {
      for (std::size_t k = 0; k < grads.size(); ++k) {
        if (param_group(params.items()[k].name) != ParamGroup::nli) continue;
        for (std::size_t i = 0; i < grads[k].size(); ++i)
          row.max_nli_grad = std::max(row.max_nli_grad, std::abs(double(grads[k][i])));
      }
    };
    const auto run = train<float>(vd, vc, hooks);
    row.steps = run.log.size();
    row.report = evaluate<float>(variant_name(v), {&run.params}, vc.model, sets, vc.train.max_answer_len, threads);
    table.rows.push_back(std::move(row));
  }
  return table;
}

#define MRC_INSTANTIATE(Real)                                                                                    \
  template void check_vocab(const ParamStore<Real>&, const ModelConfig&);                                       \
  template EvalReport evaluate(const std::string&, const std::vector<const ParamStore<Real>*>&, const ModelConfig&, \
                               const EvalSets&, std::size_t, std::size_t);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
