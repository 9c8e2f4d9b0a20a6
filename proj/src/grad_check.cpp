#include "mrc/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mrc/rng.hpp"

namespace mrc {

const GradCheckEntry& GradCheckReport::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw UsageError("no grad-check entry for " + name);
}

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.max_rel_error);
  return w;
}

std::string GradCheckReport::to_text() const {
  std::ostringstream os;
  os << "parameter\tprobed\tworst_index\tmax_rel_error\tanalytic\tnumeric\tstatus\n";
  for (const auto& e : entries) {
    os << e.name << '\t' << e.probed << '\t' << e.worst_index << '\t' << e.max_rel_error << '\t' << e.analytic << '\t'
       << e.numeric << '\t' << (e.passed ? "PASS" : "FAIL") << '\n';
  }
  os << "overall\t" << (passed ? "PASS" : "FAIL") << "\ttolerance=" << tolerance << "\tworst=" << worst() << '\n';
  return os.str();
}

namespace {

double evaluate(const LossBuilder& build_loss, const ParamStore<double>& params) {
  ad::Tape<double> tape;
  ParamBinder<double> binder(tape, params);
  const double v = build_loss(binder).value().item();
  if (!std::isfinite(v)) throw NumericError("non-finite loss while probing gradients");
  return v;
}

std::vector<std::size_t> choose_coords(const Tensor<double>& grad, std::size_t limit, Rng& rng) {
  std::vector<std::size_t> all(grad.size());
  std::iota(all.begin(), all.end(), 0);
  if (limit == 0 || limit >= all.size()) return all;
  std::size_t top = 0;
  for (std::size_t i = 1; i < grad.size(); ++i)
    if (std::fabs(grad[i]) > std::fabs(grad[top])) top = i;
  std::vector<std::size_t> picked = {top};
  std::swap(all[top], all.back());
  all.pop_back();
  // partial Fisher-Yates
  for (std::size_t k = 0; picked.size() < limit; ++k) {
    const std::size_t j = k + rng.index(all.size() - k);
    std::swap(all[k], all[j]);
    picked.push_back(all[k]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& build_loss, ParamStore<double>& params, const GradCheckOptions& opts) {
  ad::GradTable<double> analytic;
  {
    ad::Tape<double> tape;
    ParamBinder<double> binder(tape, params);
    auto loss = build_loss(binder);
    if (!std::isfinite(loss.value().item())) throw NumericError("non-finite loss at the unperturbed point");
    analytic = tape.backward(loss);
  }

  GradCheckReport report;
  report.tolerance = opts.tolerance;
  Rng rng(opts.seed);
  for (auto& p : params.items()) {
    auto it = analytic.find(p.name);
    const Tensor<double> grad = it != analytic.end() ? it->second : Tensor<double>(p.value.rows(), p.value.cols());
    GradCheckEntry entry;
    entry.name = p.name;
    for (std::size_t idx : choose_coords(grad, opts.max_coords_per_param, rng)) {
      const double saved = p.value[idx];
      p.value[idx] = saved + opts.epsilon;
      const double up = evaluate(build_loss, params);
      p.value[idx] = saved - opts.epsilon;
      const double down = evaluate(build_loss, params);
      p.value[idx] = saved;
      const double numeric = (up - down) / (2.0 * opts.epsilon);
      const double a = grad[idx];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), opts.abs_floor});
      const double rel = std::fabs(a - numeric) / denom;
      if (entry.probed == 0 || rel > entry.max_rel_error) {
        entry.max_rel_error = rel;
        entry.worst_index = idx;
        entry.analytic = a;
        entry.numeric = numeric;
      }
      ++entry.probed;
    }
    entry.passed = entry.max_rel_error < opts.tolerance;
    report.passed = report.passed && entry.passed;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace mrc
