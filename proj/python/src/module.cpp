#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrc/decoder.hpp"
#include "mrc/errors.hpp"
#include "mrc/run_io.hpp"

namespace py = pybind11;
using namespace mrc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor<double> to_tensor(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  return Tensor<double>(a.shape(0), a.shape(1), std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Tensor<double>& t) {
  Array a({t.rows(), t.cols()});
  std::copy(t.values().begin(), t.values().end(), a.mutable_data());
  return a;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d, subsets;
  d["dataset"] = r.dataset;
  d["em"] = r.em;
  d["f1"] = r.f1;
  d["count"] = r.count;
  for (const auto& s : r.subsets) {
    py::dict row;
    row["em"] = s.em;
    row["f1"] = s.f1;
    row["count"] = s.count;
    subsets[py::str(s.name)] = row;
  }
  d["subsets"] = subsets;
  return d;
}

Config config_from(const std::string& path, std::optional<std::uint64_t> seed) {
  Config c = path.empty() ? desk_preset() : load_config(path);
  if (seed) c.train.seed = *seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_mrc_toolkit, m) {
  m.doc() = "Bindings for the mrc reading comprehension toolkit";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });
  m.def("exact_match", [](const std::string& p, const std::string& g) { return exact_match(p, g); });
  m.def("token_f1", [](const std::string& p, const std::string& g) { return token_f1(p, g); });
  m.def("sampling_probs", &compute_sampling_probs, py::arg("sizes"));
  m.def(
      "joint_loss",
      [](std::optional<double> nli, std::optional<double> mrc, double alpha, double beta) {
        return joint_loss(nli, mrc, alpha, beta);
      },
        py::arg("nli"), py::arg("mrc"), py::arg("alpha") = 0.5, py::arg("beta") = 1.0);

  m.def(
      "mem_att",
      [](const Array& q, const Array& k, const Array& v, const std::string& mode) {
        AttentionMode am;
        if (mode == "memory") am = AttentionMode::memory;
        else if (mode == "standard") am = AttentionMode::standard;
        else throw UsageError("mode must be 'memory' or 'standard'");
        ad::Tape<double> tape;
        const auto r = mem_att(tape.constant(to_tensor(q)), tape.constant(to_tensor(k)), tape.constant(to_tensor(v)),
                               nullptr, am);
        return to_array(r.output.value());
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("mode") = "memory",
      "Unmasked memory-guided attention on dense arrays.");

  m.def(
      "gen_data",
      [](const std::string& out, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.seed = seed;
        write_synthetic(out, gen_synthetic(spec));
      },
      py::arg("out"), py::arg("seed") = kDefaultDataSeed);

  m.def(
      "train",
      [](const std::string& out, const std::string& config, const std::string& data, std::optional<std::uint64_t> seed) {
        Config cfg = config_from(config, seed);
        const Corpus corpus = corpus_or_synthetic(data, cfg.model.max_seq_len, kDefaultDataSeed);
        cfg.model.vocab_size = corpus.vocab.size();
        TrainResult<float> run;
        {
          py::gil_scoped_release release;
          run = train<float>(corpus.train, cfg);
        }
        save_run(out, run, corpus.vocab, cfg);
        py::dict d;
        d["steps"] = run.log.size();
        d["epochs"] = run.epochs_run;
        d["final_loss"] = run.log.empty() ? 0.0 : run.log.back().l_total;
        return d;
      },
      py::arg("out"), py::arg("config") = "", py::arg("data") = "", py::arg("seed") = py::none());

  m.def(
      "evaluate",
      [](const std::vector<std::string>& checkpoints, const std::string& data) {
        if (checkpoints.empty()) throw UsageError("at least one checkpoint is required");
        std::vector<LoadedRun> runs;
        for (const auto& c : checkpoints) runs.push_back(load_run(c));
        const auto& head = runs.front();
        for (const auto& r : runs)
          if (r.vocab.tokens() != head.vocab.tokens()) throw DataError("ensemble members use different vocabularies");
        const Corpus corpus = corpus_or_synthetic(data, head.cfg.model.max_seq_len, kDefaultDataSeed, &head.vocab);
        std::vector<const ParamStore<float>*> models;
        for (const auto& r : runs) models.push_back(&r.params);
        return report_dict(evaluate<float>(data.empty() ? "synthetic" : data, models, head.cfg.model,
                                           eval_sets(corpus), head.cfg.train.max_answer_len));
      },
      py::arg("checkpoints"), py::arg("data") = "");

  m.def(
      "gradcheck",
      [](const std::string& config, std::size_t coords) {
        Config cfg = config_from(config, std::nullopt);
        const Corpus corpus = corpus_or_synthetic("", cfg.model.max_seq_len, kDefaultDataSeed);
        cfg.model.vocab_size = corpus.vocab.size();
        GradCheckOptions opts;
        opts.max_coords_per_param = coords;
        const auto r = audit_gradients(cfg, corpus.train, opts);
        return py::make_tuple(r.passed, r.worst());
      },
      py::arg("config") = "", py::arg("coords") = 4);
}
