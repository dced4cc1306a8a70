#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pacs/cnf.hpp"
#include "pacs/errors.hpp"
#include "pacs/estimator.hpp"
#include "pacs/harness.hpp"
#include "pacs/llm.hpp"
#include "pacs/population.hpp"
#include "pacs/search.hpp"
#include "pacs/simulation.hpp"

namespace {

using namespace pacs;
using json = nlohmann::json;

// Problems a correct invocation could not hit: exit 1 instead of 2.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string dataset;
  std::string record;
  std::string method = "pacs";
  std::string sampler = "scripted";
  std::string script;
  std::string population;
  std::string report;
  std::string trace;
  std::string config;
  int n = 3;
  int m = 2;
  int max_steps = 8;
  std::int64_t time_limit_ms = 120000;
  int k = 20;
  std::uint64_t seed = 0;
  int workers = 1;
  std::uint64_t enumeration_cap = 200000;
};

struct ScoreOptions {
  std::vector<std::string> formulas;
  std::string file;
  std::string dimacs;
};

void require_member(const std::string& value, std::initializer_list<const char*> allowed,
                    const std::string& flag) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string msg = flag + " must be one of {";
  bool first = true;
  for (const char* a : allowed) {
    if (!first) msg += ", ";
    msg += a;
    first = false;
  }
  throw UsageFailure(msg + "}, got '" + value + "'");
}

void apply_config(Options& o) {
  std::ifstream in(o.config);
  if (!in) throw UsageFailure("cannot open config: " + o.config);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw UsageFailure("config must be a JSON object: " + o.config);
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "dataset") o.dataset = it->get<std::string>();
      else if (key == "record") o.record = it->get<std::string>();
      else if (key == "method") o.method = it->get<std::string>();
      else if (key == "sampler") o.sampler = it->get<std::string>();
      else if (key == "script") o.script = it->get<std::string>();
      else if (key == "population") o.population = it->get<std::string>();
      else if (key == "report") o.report = it->get<std::string>();
      else if (key == "trace") o.trace = it->get<std::string>();
      else if (key == "n") o.n = it->get<int>();
      else if (key == "m") o.m = it->get<int>();
      else if (key == "max_steps") o.max_steps = it->get<int>();
      else if (key == "time_limit_ms") o.time_limit_ms = it->get<std::int64_t>();
      else if (key == "k") o.k = it->get<int>();
      else if (key == "seed") o.seed = it->get<std::uint64_t>();
      else if (key == "workers") o.workers = it->get<int>();
      else if (key == "enumeration_cap") o.enumeration_cap = it->get<std::uint64_t>();
      else throw UsageFailure("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw UsageFailure(std::string("bad config value: ") + e.what());
  }
  require_member(o.method, {"pacs", "cot", "sc"}, "method");
  require_member(o.sampler, {"scripted", "population", "llm"}, "sampler");
}

SearchConfig search_config(const Options& o) {
  SearchConfig c;
  c.n = o.n;
  c.m = o.m;
  c.max_steps = o.max_steps;
  c.wall_time_limit = std::chrono::milliseconds(o.time_limit_ms);
  c.random_seed = o.seed;
  return c;
}

SamplerFactory make_factory(const Options& o,
                            std::optional<ReasonerPopulation>& population,
                            TraceWriter* trace) {
  if (o.sampler == "scripted") {
    if (o.script.empty())
      throw UsageFailure("--sampler scripted needs --script");
    return scripted_sampler_factory(load_script(o.script));
  }
  if (o.sampler == "population") {
    if (o.population.empty())
      throw UsageFailure("--sampler population needs --population");
    population = load_population(o.population);
    return population_sampler_factory(*population);
  }
  auto sampler = std::make_shared<LlmSampler>(completion_config_from_env(),
                                              default_prompt_template(), trace);
  return shared_sampler_factory(std::move(sampler));
}

std::vector<DatasetRecord> resolve_dataset(
    const Options& o, const std::optional<ReasonerPopulation>& population) {
  if (!o.dataset.empty()) {
    std::vector<DatasetDiagnostic> diagnostics;
    auto records = load_dataset(o.dataset, true, &diagnostics);
    for (const auto& d : diagnostics)
      std::cerr << o.dataset << ":" << d.line << ": " << d.message << "\n";
    return records;
  }
  if (population)
    return {record_from_population(*population, "population_problem")};
  throw UsageFailure("--dataset is required unless --sampler population "
                     "supplies its own problem");
}

// Keeps the trace stream alive for as long as its writer is handed around.
struct TraceFile {
  std::ofstream stream;
  std::unique_ptr<TraceWriter> writer;

  explicit TraceFile(const std::string& path) {
    if (path.empty()) return;
    stream.open(path);
    if (!stream) throw Error("cannot open trace file: " + path);
    writer = std::make_unique<TraceWriter>(stream);
  }
};

int run_solve(const Options& o) {
  TraceFile trace(o.trace);
  std::optional<ReasonerPopulation> population;
  auto factory = make_factory(o, population, trace.writer.get());
  auto records = resolve_dataset(o, population);
  if (records.empty()) throw Error("dataset has no records");

  const DatasetRecord* rec = &records.front();
  if (!o.record.empty()) {
    rec = nullptr;
    for (const auto& r : records)
      if (r.id == o.record) rec = &r;
    if (!rec) throw Error("no record with id '" + o.record + "'");
  }

  ProblemInstance problem = rec->problem();
  std::uint64_t record_seed = mix_seed(o.seed, rec->id);
  auto sampler = factory(*rec, record_seed);
  SearchConfig config = search_config(o);
  config.random_seed = record_seed;

  SearchStats stats;
  auto paths = run_search(problem, *sampler, config, trace.writer.get(), &stats);
  Estimate est = estimate_ap(paths);

  std::cout << "record " << rec->id << ": " << rec->query_text << "\n";
  std::cout << "query logic: " << render_formula(problem.query) << "\n";
  for (size_t i = 0; i < paths.size(); ++i) {
    const CompletedPath& p = paths[i];
    std::cout << "path " << i + 1 << ": answer "
              << (p.answer ? "True" : "False") << ", " << to_string(p.stop_reason)
              << ", depth " << p.depth << (p.conflict ? ", conflict" : "")
              << "\n";
    for (size_t s = 0; s < p.chain.size(); ++s) {
      const Thought& t = p.chain[s];
      std::cout << "  #" << s + 1 << " " << t.text << "\n";
      if (t.formula) std::cout << "     " << render_formula(t.formula) << "\n";
      if (t.is_final)
        std::cout << "     return " << (*t.declared_answer ? "True" : "False")
                  << "\n";
    }
  }
  std::cout << "votes: " << est.votes_true << " true, " << est.votes_false
            << " false over " << est.k << " paths\n";
  std::cout << "ap_hat: " << est.ap_hat << "\n";
  std::cout << "verdict: " << to_string(est.verdict) << "\n";
  std::cerr << "sampler calls " << stats.sampler_calls << ", steps "
            << stats.steps << ", dropped " << stats.dropped_inconsistent
            << " inconsistent / " << stats.dropped_atom_budget
            << " over budget / " << stats.dropped_beam << " beam\n";
  return 0;
}

int run_eval_cmd(const Options& o) {
  TraceFile trace(o.trace);
  std::optional<ReasonerPopulation> population;
  auto factory = make_factory(o, population, trace.writer.get());
  auto records = resolve_dataset(o, population);
  if (records.empty()) throw Error("dataset has no records");

  EvalConfig config;
  config.method = method_from_string(o.method);
  config.search = search_config(o);
  config.k = o.k;
  config.seed = o.seed;
  config.workers = o.workers;

  RunReport report = run_eval(records, config, factory, trace.writer.get());

  if (!o.report.empty()) {
    std::ofstream out(o.report);
    if (!out) throw Error("cannot open report file: " + o.report);
    write_report(out, report);
  } else {
    write_report(std::cout, report);
  }

  int failures = 0;
  for (const auto& r : report.records) failures += r.error.empty() ? 0 : 1;
  const MetricSet& m = report.metrics;
  char line[256];
  std::snprintf(line, sizeof line,
                "accuracy %.4f ci [%.4f, %.4f] never_correct %.4f "
                "mean_path_length %.3f mean_sampler_calls %.3f",
                m.accuracy, m.ci_low, m.ci_high, m.never_correct_rate,
                m.mean_path_length, m.mean_sampler_calls);
  std::cerr << line << "\n";
  if (failures)
    std::cerr << failures << " of " << report.records.size()
              << " records failed; see the report rows\n";
  return 0;
}

int run_simulate(const Options& o) {
  if (o.population.empty()) throw UsageFailure("simulate needs --population");
  ReasonerPopulation pop = load_population(o.population);
  int n = pop.num_props();

  MdpSolution solution = value_iteration(pop);
  Rational residual = bellman_residual(pop, solution);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!o.report.empty()) {
    file.open(o.report);
    if (!file) throw Error("cannot open report file: " + o.report);
    os = &file;
  }

  *os << json{{"type", "mdp"},
              {"root_value", to_string(solution.root_value)},
              {"root_value_approx", to_double(solution.root_value)},
              {"bellman_residual", to_string(residual)},
              {"reachable_states", solution.states.size()}}
             .dump()
      << "\n";

  std::vector<int> forward(n), backward(n);
  std::iota(forward.begin(), forward.end(), 0);
  std::iota(backward.rbegin(), backward.rend(), 0);
  std::vector<OrderingPolicy> policies;
  policies.push_back(OrderingPolicy::optimal(solution));
  policies.push_back(OrderingPolicy::fixed(forward));
  policies.push_back(OrderingPolicy::fixed(backward));
  policies.push_back(OrderingPolicy::random_fixed(n, o.seed));
  policies.push_back(OrderingPolicy::greedy_score());

  bool all_ok = true;
  Rational optimal_time, greedy_time, random_time;
  for (const auto& policy : policies) {
    EquivalenceReport rep = verify_equivalence(pop, policy);
    all_ok = all_ok && rep.ok;
    if (policy.name() == "optimal") optimal_time = rep.expected_stop_time;
    if (policy.name() == "greedy_score") greedy_time = rep.expected_stop_time;
    if (policy.name().starts_with("random_fixed"))
      random_time = rep.expected_stop_time;
    *os << json{{"type", "policy"},
                {"name", rep.policy_name},
                {"ok", rep.ok},
                {"expected_stop_time", to_string(rep.expected_stop_time)},
                {"expected_stop_time_approx", to_double(rep.expected_stop_time)},
                {"support_size", rep.support_size},
                {"distinct_truncations", rep.distinct_truncations},
                {"full_true_mass", to_string(rep.full_true_mass)},
                {"stopped_true_mass", to_string(rep.stopped_true_mass)}}
               .dump()
        << "\n";
  }

  *os << json{{"type", "gaps"},
              {"greedy_vs_optimal", to_string(greedy_time - optimal_time)},
              {"greedy_vs_optimal_approx", to_double(greedy_time - optimal_time)},
              {"greedy_vs_random", to_string(greedy_time - random_time)},
              {"greedy_vs_random_approx", to_double(greedy_time - random_time)}}
             .dump()
      << "\n";

  PolicyEnumeration enumeration =
      enumerate_deterministic_policies(pop, o.enumeration_cap);
  *os << json{{"type", "enumeration"},
              {"policies", enumeration.count},
              {"best", to_string(enumeration.best)},
              {"worst", to_string(enumeration.worst)},
              {"truncated", enumeration.truncated},
              {"optimal_matches_best",
               !enumeration.truncated && enumeration.best == solution.root_value}}
             .dump()
      << "\n";
  os->flush();

  std::cerr << "root value " << to_string(solution.root_value) << ", residual "
            << to_string(residual) << ", "
            << (all_ok ? "all policies verified" : "policy verification FAILED")
            << "\n";
  return all_ok ? 0 : 2;
}

int run_score(const ScoreOptions& o) {
  std::vector<std::string> sources = o.formulas;
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw Error("cannot open formula file: " + o.file);
    std::string line;
    while (std::getline(in, line)) {
      auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      sources.push_back(line);
    }
  }
  if (sources.empty())
    throw UsageFailure("score needs --formula or --file input");

  std::vector<FormulaPtr> state;
  for (const auto& s : sources) state.push_back(parse_formula(s));
  Vocabulary vocab = vocabulary_of(state);

  if (!o.dimacs.empty()) {
    std::ofstream out(o.dimacs);
    if (!out) throw Error("cannot open dimacs file: " + o.dimacs);
    to_cnf(state, vocab).to_dimacs(out, &vocab);
  }

  ScoreBreakdown b = score_state(state, vocab);
  std::cout << "(" << b.model_count << ", " << b.var_count << ", "
            << b.backbone_count << ", " << b.score << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abductive query answering over premise sets"};
  app.require_subcommand(1);

  Options o;
  ScoreOptions so;

  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--dataset", o.dataset, "line-delimited records file");
    cmd->add_option("--sampler", o.sampler, "thought source")
        ->check(CLI::IsMember({"scripted", "population", "llm"}));
    cmd->add_option("--script", o.script, "replay script for the scripted sampler");
    cmd->add_option("--population", o.population, "reasoner population file");
    cmd->add_option("--n", o.n, "candidates per expansion");
    cmd->add_option("--m", o.m, "beam width");
    cmd->add_option("--max-steps", o.max_steps, "expansion steps per problem");
    cmd->add_option("--time-limit", o.time_limit_ms, "per-problem wall limit (ms)");
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--trace", o.trace, "JSONL trace file");
    cmd->add_option("--config", o.config, "JSON config overriding flags");
  };

  CLI::App* solve = app.add_subcommand("solve", "answer one record end to end");
  add_common(solve);
  solve->add_option("--record", o.record, "record id (default: the first)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a dataset and write a report");
  add_common(eval);
  eval->add_option("--method", o.method, "evaluation method")
      ->check(CLI::IsMember({"pacs", "cot", "sc"}));
  eval->add_option("--k", o.k, "chains per record for sc");
  eval->add_option("--workers", o.workers, "concurrent records");
  eval->add_option("--report", o.report, "JSONL report file (default stdout)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "verify early stopping on a population");
  simulate->add_option("--population", o.population, "reasoner population file");
  simulate->add_option("--seed", o.seed, "seed for the random fixed ordering");
  simulate->add_option("--report", o.report, "JSONL report file (default stdout)");
  simulate->add_option("--cap", o.enumeration_cap, "policy enumeration cap");
  simulate->add_option("--config", o.config, "JSON config overriding flags");

  CLI::App* score =
      app.add_subcommand("score", "print (models, vars, backbones, score)");
  score->add_option("--formula", so.formulas, "state formula (repeatable)");
  score->add_option("--file", so.file, "file with one formula per line");
  score->add_option("--dimacs", so.dimacs, "also write the state's CNF here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!o.config.empty()) apply_config(o);
    if (solve->parsed()) return run_solve(o);
    if (eval->parsed()) return run_eval_cmd(o);
    if (simulate->parsed()) return run_simulate(o);
    if (score->parsed()) return run_score(so);
  } catch (const UsageFailure& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
