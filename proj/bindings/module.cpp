#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pacs/engine.hpp"
#include "pacs/errors.hpp"
#include "pacs/harness.hpp"
#include "pacs/logic.hpp"
#include "pacs/simulation.hpp"

namespace py = pybind11;
using namespace pacs;

namespace {

std::vector<FormulaPtr> parse_all(const std::vector<std::string>& texts) {
  std::vector<FormulaPtr> out;
  for (const auto& t : texts) out.push_back(parse_formula(t));
  return out;
}

py::dict record_dict(const RecordResult& r) {
  py::dict d;
  d["id"] = r.id;
  d["label"] = r.label;
  d["verdict"] = to_string(r.verdict);
  d["correct"] = r.correct;
  d["ap_hat"] = r.ap_hat;
  d["k"] = r.k;
  d["votes_true"] = r.votes_true;
  d["votes_false"] = r.votes_false;
  d["path_depths"] = r.path_depths;
  d["stop_reasons"] = r.stop_reasons;
  d["conflicts"] = r.conflicts;
  d["sampler_calls"] = r.sampler_calls;
  d["error"] = r.error;
  return d;
}

py::dict eval_dataset(const std::string& dataset, const std::string& script,
                      const std::string& population, const std::string& method,
                      int n, int m, int max_steps, int k, std::uint64_t seed,
                      int workers) {
  std::optional<ReasonerPopulation> pop;
  SamplerFactory factory;
  if (!script.empty()) {
    factory = scripted_sampler_factory(load_script(script));
  } else if (!population.empty()) {
    pop = load_population(population);
    factory = population_sampler_factory(*pop);
  } else {
    throw Error("eval_dataset needs script= or population=");
  }

  std::vector<DatasetRecord> records;
  if (!dataset.empty()) {
    records = load_dataset(dataset);
  } else if (pop) {
    records = {record_from_population(*pop, "population_problem")};
  } else {
    throw Error("eval_dataset needs dataset= when the sampler is scripted");
  }

  EvalConfig config;
  config.method = method_from_string(method);
  config.search.n = n;
  config.search.m = m;
  config.search.max_steps = max_steps;
  config.k = k;
  config.seed = seed;
  config.workers = workers;

  RunReport report;
  {
    py::gil_scoped_release release;
    report = run_eval(records, config, factory);
  }

  py::list rows;
  for (const auto& r : report.records) rows.append(record_dict(r));
  py::dict metrics;
  metrics["accuracy"] = report.metrics.accuracy;
  metrics["ci_low"] = report.metrics.ci_low;
  metrics["ci_high"] = report.metrics.ci_high;
  metrics["never_correct_rate"] = report.metrics.never_correct_rate;
  metrics["mean_path_length"] = report.metrics.mean_path_length;
  metrics["mean_sampler_calls"] = report.metrics.mean_sampler_calls;

  py::dict out;
  out["records"] = rows;
  out["metrics"] = metrics;
  out["method"] = to_string(config.method);
  out["seed"] = config.seed;
  return out;
}

py::dict simulate(const std::string& population, std::uint64_t seed,
                  std::uint64_t cap) {
  ReasonerPopulation pop = load_population(population);
  int n = pop.num_props();

  MdpSolution solution;
  Rational residual;
  std::vector<EquivalenceReport> reports;
  std::vector<std::string> names;
  PolicyEnumeration enumeration;
  {
    py::gil_scoped_release release;
    solution = value_iteration(pop);
    residual = bellman_residual(pop, solution);

    std::vector<int> forward(n), backward(n);
    std::iota(forward.begin(), forward.end(), 0);
    std::iota(backward.rbegin(), backward.rend(), 0);
    std::vector<OrderingPolicy> policies;
    policies.push_back(OrderingPolicy::optimal(solution));
    policies.push_back(OrderingPolicy::fixed(forward));
    policies.push_back(OrderingPolicy::fixed(backward));
    policies.push_back(OrderingPolicy::random_fixed(n, seed));
    policies.push_back(OrderingPolicy::greedy_score());
    for (const auto& p : policies) {
      reports.push_back(verify_equivalence(pop, p));
      names.push_back(p.name());
    }
    enumeration = enumerate_deterministic_policies(pop, cap);
  }

  py::list rows;
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    py::dict d;
    d["name"] = names[i];
    d["ok"] = r.ok;
    d["expected_stop_time"] = to_string(r.expected_stop_time);
    d["expected_stop_time_approx"] = to_double(r.expected_stop_time);
    d["support_size"] = r.support_size;
    d["distinct_truncations"] = r.distinct_truncations;
    d["full_true_mass"] = to_string(r.full_true_mass);
    d["stopped_true_mass"] = to_string(r.stopped_true_mass);
    rows.append(d);
  }

  py::dict en;
  en["policies"] = enumeration.count;
  en["best"] = to_string(enumeration.best);
  en["worst"] = to_string(enumeration.worst);
  en["truncated"] = enumeration.truncated;

  py::dict out;
  out["root_value"] = to_string(solution.root_value);
  out["root_value_approx"] = to_double(solution.root_value);
  out["bellman_residual"] = to_string(residual);
  out["reachable_states"] = solution.states.size();
  out["policies"] = rows;
  out["enumeration"] = en;
  return out;
}

}  // namespace

PYBIND11_MODULE(_pacs, mod) {
  mod.doc() = "abductive query answering over premise sets";

  mod.def(
      "render",
      [](const std::string& text) { return render_formula(parse_formula(text)); },
      py::arg("formula"), "Canonical form of a formula string.");

  mod.def(
      "is_satisfiable",
      [](const std::vector<std::string>& state) {
        auto fs = parse_all(state);
        return is_satisfiable(fs, vocabulary_of(fs));
      },
      py::arg("state"), "Whether the conjunction of the formulas has a model.");

  mod.def(
      "truth_value",
      [](const std::string& query, const std::vector<std::string>& state) {
        auto fs = parse_all(state);
        FormulaPtr q = parse_formula(query);
        Vocabulary vocab = vocabulary_of(fs);
        vocab.add_formula(q);
        return to_string(truth_value(q, fs, vocab));
      },
      py::arg("query"), py::arg("state"),
      "'True', 'False', or 'Unknown': the query's status under the state.");

  mod.def(
      "model_count",
      [](const std::vector<std::string>& state) {
        auto fs = parse_all(state);
        return model_count(fs, vocabulary_of(fs));
      },
      py::arg("state"), "Satisfying assignments over the state's atoms.");

  mod.def(
      "backbone_count",
      [](const std::vector<std::string>& state) {
        auto fs = parse_all(state);
        return backbone_count(fs, vocabulary_of(fs));
      },
      py::arg("state"), "Atoms fixed to one value across all models.");

  mod.def(
      "score",
      [](const std::vector<std::string>& state) {
        auto fs = parse_all(state);
        ScoreBreakdown b = score_state(fs, vocabulary_of(fs));
        return py::make_tuple(b.model_count, b.var_count, b.backbone_count,
                              b.score);
      },
      py::arg("state"),
      "(model_count, var_count, backbone_count, score) of a state.");

  mod.def("eval_dataset", &eval_dataset, py::arg("dataset") = "",
          py::arg("script") = "", py::arg("population") = "",
          py::arg("method") = "pacs", py::arg("n") = 3, py::arg("m") = 2,
          py::arg("max_steps") = 8, py::arg("k") = 20, py::arg("seed") = 0,
          py::arg("workers") = 1,
          "Evaluate a dataset with a scripted or population sampler.");

  mod.def("simulate", &simulate, py::arg("population"), py::arg("seed") = 0,
          py::arg("cap") = 200000,
          "Solve and verify the stopping problem of a reasoner population.");
}
