#include "pacs/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pacs/errors.hpp"
#include "pacs/rational.hpp"

namespace pacs {

using json = nlohmann::json;

namespace {

std::string location(const std::string& path, int line) {
  return path + ":" + std::to_string(line) + ": ";
}

json parse_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DatasetError(std::string("cannot open ") + what + ": " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw DatasetError(std::string("invalid JSON in ") + what + ": " + path);
  return j;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DatasetError(where + "missing field '" + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key,
                         const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string())
    throw DatasetError(where + "field '" + key + "' must be a string");
  return v.get<std::string>();
}

FormulaPtr logic_field(const json& obj, const char* key,
                       const std::string& where) {
  std::string text = string_field(obj, key, where);
  try {
    return parse_formula(text);
  } catch (const ParseError& e) {
    throw DatasetError(where + "field '" + key + "' does not parse: " +
                       e.what());
  }
}

DatasetRecord parse_record(const json& j, const std::string& where) {
  if (!j.is_object()) throw DatasetError(where + "record is not an object");
  static const char* allowed[] = {"id",          "premises", "query_text",
                                  "query_logic", "label",    "constants"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw DatasetError(where + "unknown field '" + it.key() + "'");
  }

  DatasetRecord rec;
  rec.id = string_field(j, "id", where);
  if (rec.id.empty()) throw DatasetError(where + "empty record id");

  const json& premises = field(j, "premises", where);
  if (!premises.is_array() || premises.empty())
    throw DatasetError(where + "'premises' must be a non-empty array");
  for (size_t i = 0; i < premises.size(); ++i) {
    std::string at = where + "premise " + std::to_string(i + 1) + ": ";
    rec.premises.push_back({string_field(premises[i], "text", at),
                            logic_field(premises[i], "logic", at)});
  }

  rec.query_text = string_field(j, "query_text", where);
  rec.query_logic = logic_field(j, "query_logic", where);

  const json& label = field(j, "label", where);
  if (!label.is_boolean())
    throw DatasetError(where + "'label' must be true or false");
  rec.label = label.get<bool>();

  if (auto it = j.find("constants"); it != j.end()) {
    if (!it->is_array())
      throw DatasetError(where + "'constants' must be an array of strings");
    for (const json& c : *it) {
      if (!c.is_string())
        throw DatasetError(where + "'constants' must be an array of strings");
      rec.constants.push_back(c.get<std::string>());
    }
  }

  try {
    rec.problem();  // grounding must succeed up front
  } catch (const Error& e) {
    throw DatasetError(where + e.what());
  }
  return rec;
}

Thought parse_script_candidate(const json& j, const std::string& where) {
  if (!j.is_object()) throw DatasetError(where + "candidate is not an object");
  std::string text = string_field(j, "text", where);
  bool is_final = false;
  if (auto it = j.find("final"); it != j.end()) {
    if (!it->is_boolean())
      throw DatasetError(where + "'final' must be true or false");
    is_final = it->get<bool>();
  }
  FormulaPtr formula;
  if (j.contains("logic")) formula = logic_field(j, "logic", where);
  if (is_final) {
    const json& answer = field(j, "answer", where);
    if (!answer.is_boolean())
      throw DatasetError(where + "'answer' must be true or false");
    return make_final(std::move(text), answer.get<bool>(), std::move(formula));
  }
  if (j.contains("answer"))
    throw DatasetError(where + "'answer' is only valid on final candidates");
  if (!formula)
    throw DatasetError(where + "non-final candidate needs a 'logic' field");
  return make_thought(std::move(text), std::move(formula));
}

std::string parse_script_chain(const json& j, const std::string& where) {
  if (!j.is_array()) throw DatasetError(where + "'chain' must be an array");
  std::string fingerprint;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string())
      throw DatasetError(where + "'chain' entries must be formula strings");
    FormulaPtr f;
    try {
      f = parse_formula(j[i].get<std::string>());
    } catch (const ParseError& e) {
      throw DatasetError(where + "chain entry " + std::to_string(i + 1) +
                         " does not parse: " + e.what());
    }
    if (i) fingerprint += "; ";
    fingerprint += render_formula(f);
  }
  return fingerprint;
}

Epistemic epistemic_from_string(const std::string& s, const std::string& where) {
  if (s == "Know") return Epistemic::Know;
  if (s == "KnowNot") return Epistemic::KnowNot;
  if (s == "Unknown") return Epistemic::Unknown;
  throw DatasetError(where + "unknown stance '" + s +
                     "' (expected Know, KnowNot, or Unknown)");
}

Rational weight_field(const json& j, const std::string& where) {
  try {
    if (j.is_number()) return rational_from_double(j.get<double>());
    if (j.is_string()) return rational_from_string(j.get<std::string>());
  } catch (const std::exception& e) {
    throw DatasetError(where + "bad weight: " + e.what());
  }
  throw DatasetError(where + "'weight' must be a number or a fraction string");
}

SamplerRequest baseline_request(const ProblemInstance& problem,
                                std::vector<Thought> chain) {
  SamplerRequest req;
  for (size_t i = 0; i < problem.premises.size(); ++i) {
    if (i) req.premises_text += '\n';
    req.premises_text += problem.premises[i].text;
    req.premises_logic.push_back(problem.premises[i].logic);
  }
  req.query_text = problem.query_text;
  req.query_formula = problem.query;
  req.chain = std::move(chain);
  req.n = 1;
  return req;
}

void fill_estimate(RecordResult& r, const Estimate& est) {
  r.verdict = est.verdict;
  r.ap_hat = est.ap_hat;
  r.k = est.k;
  r.votes_true = est.votes_true;
  r.votes_false = est.votes_false;
}

void eval_pacs(const DatasetRecord& rec, const EvalConfig& config,
               const SamplerFactory& factory, std::uint64_t record_seed,
               TraceWriter* trace, RecordResult& r) {
  ProblemInstance problem = rec.problem();
  auto sampler = factory(rec, record_seed);
  SearchConfig search = config.search;
  search.random_seed = record_seed;
  SearchStats stats;
  std::vector<CompletedPath> paths;
  try {
    paths = run_search(problem, *sampler, search, trace, &stats);
  } catch (...) {
    r.sampler_calls = stats.sampler_calls;
    throw;
  }
  r.sampler_calls = stats.sampler_calls;
  for (const auto& p : paths) {
    r.path_depths.push_back(p.depth);
    r.stop_reasons.push_back(to_string(p.stop_reason));
    r.conflicts += p.conflict ? 1 : 0;
  }
  fill_estimate(r, estimate_ap(paths));
}

void eval_chains(const DatasetRecord& rec, const EvalConfig& config,
                 const SamplerFactory& factory, std::uint64_t record_seed,
                 int num_chains, RecordResult& r) {
  ProblemInstance problem = rec.problem();
  std::vector<bool> votes;
  for (int c = 0; c < num_chains; ++c) {
    auto sampler =
        factory(rec, mix_seed(record_seed, "chain", static_cast<std::uint64_t>(c)));
    std::vector<Thought> chain;
    for (int step = 0; step < config.search.max_steps; ++step) {
      ++r.sampler_calls;
      std::vector<Thought> candidates;
      try {
        candidates = sampler->sample_candidates(baseline_request(problem, chain));
      } catch (const SamplerExhausted&) {
        break;
      }
      if (candidates.empty()) break;
      Thought t = std::move(candidates.front());
      if (t.is_final) {
        votes.push_back(*t.declared_answer);
        r.path_depths.push_back(static_cast<int>(chain.size()) + 1);
        r.stop_reasons.push_back(to_string(StopReason::SamplerFinal));
        break;
      }
      chain.push_back(std::move(t));
    }
  }
  if (!votes.empty()) fill_estimate(r, estimate_from_votes(votes));
}

RecordResult eval_record(const DatasetRecord& rec, const EvalConfig& config,
                         const SamplerFactory& factory, TraceWriter* trace) {
  RecordResult r;
  r.id = rec.id;
  r.label = rec.label;
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t record_seed = mix_seed(config.seed, rec.id);
  try {
    if (config.method == Method::Pacs) {
      eval_pacs(rec, config, factory, record_seed, trace, r);
    } else {
      int chains = config.method == Method::Cot ? 1 : std::max(1, config.k);
      eval_chains(rec, config, factory, record_seed, chains, r);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.correct = r.verdict == (r.label ? Verdict::True : Verdict::False);
  r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

json record_json(const RecordResult& r) {
  return json{{"type", "record"},
              {"id", r.id},
              {"label", r.label},
              {"verdict", to_string(r.verdict)},
              {"correct", r.correct},
              {"ap_hat", r.ap_hat},
              {"k", r.k},
              {"votes_true", r.votes_true},
              {"votes_false", r.votes_false},
              {"path_depths", r.path_depths},
              {"stop_reasons", r.stop_reasons},
              {"conflicts", r.conflicts},
              {"sampler_calls", r.sampler_calls},
              {"wall_ms", r.wall_ms},
              {"error", r.error}};
}

}  // namespace

ProblemInstance DatasetRecord::problem() const {
  return ProblemInstance::make(premises, query_text, query_logic, constants);
}

std::vector<DatasetRecord> load_dataset(
    const std::string& path, bool strict,
    std::vector<DatasetDiagnostic>* diagnostics) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset: " + path);

  auto note = [&](int line, const std::string& message) {
    if (strict) throw DatasetError(location(path, line) + message);
    if (diagnostics) diagnostics->push_back({line, message});
  };

  std::vector<DatasetRecord> records;
  std::map<std::string, int> seen_ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      note(lineno, "line is not valid JSON");
      continue;
    }
    try {
      DatasetRecord rec = parse_record(j, "");
      auto [it, fresh] = seen_ids.emplace(rec.id, lineno);
      if (!fresh) {
        note(lineno, "duplicate record id '" + rec.id + "' (first on line " +
                         std::to_string(it->second) + ")");
        continue;
      }
      records.push_back(std::move(rec));
    } catch (const DatasetError& e) {
      note(lineno, e.what());
    }
  }
  if (records.empty() && diagnostics)
    diagnostics->push_back({0, "dataset is empty: " + path});
  return records;
}

ScriptMap load_script(const std::string& path) {
  json root = parse_json_file(path, "script");
  if (!root.is_object() || !root.contains("records") ||
      !root["records"].is_object())
    throw DatasetError("script must be an object with a 'records' object: " +
                       path);

  ScriptMap scripts;
  for (auto it = root["records"].begin(); it != root["records"].end(); ++it) {
    const std::string& id = it.key();
    std::string at = path + ": record '" + id + "': ";
    if (!it->is_array()) throw DatasetError(at + "entries must be an array");
    Script script;
    for (size_t e = 0; e < it->size(); ++e) {
      std::string entry_at = at + "entry " + std::to_string(e + 1) + ": ";
      const json& entry = (*it)[e];
      if (!entry.is_object())
        throw DatasetError(entry_at + "entry is not an object");
      std::string fingerprint = parse_script_chain(
          field(entry, "chain", entry_at), entry_at);
      const json& candidates = field(entry, "candidates", entry_at);
      if (!candidates.is_array())
        throw DatasetError(entry_at + "'candidates' must be an array");
      std::vector<Thought> thoughts;
      for (size_t c = 0; c < candidates.size(); ++c)
        thoughts.push_back(parse_script_candidate(
            candidates[c],
            entry_at + "candidate " + std::to_string(c + 1) + ": "));
      script.emplace_back(std::move(fingerprint), std::move(thoughts));
    }
    try {
      make_scripted_sampler(script);  // rejects duplicate chains up front
    } catch (const Error& e) {
      throw DatasetError(at + e.what());
    }
    scripts.emplace(id, std::move(script));
  }
  return scripts;
}

ReasonerPopulation load_population(const std::string& path) {
  json root = parse_json_file(path, "population");
  std::string at = path + ": ";
  if (!root.is_object()) throw DatasetError(at + "population is not an object");

  std::vector<Premise> premises;
  const json& jprem = field(root, "premises", at);
  if (!jprem.is_array() || jprem.empty())
    throw DatasetError(at + "'premises' must be a non-empty array");
  for (size_t i = 0; i < jprem.size(); ++i) {
    std::string pat = at + "premise " + std::to_string(i + 1) + ": ";
    premises.push_back({string_field(jprem[i], "text", pat),
                        logic_field(jprem[i], "logic", pat)});
  }
  std::string query_text = string_field(root, "query_text", at);
  FormulaPtr query = logic_field(root, "query_logic", at);
  std::vector<std::string> constants;
  if (auto it = root.find("constants"); it != root.end())
    for (const json& c : *it) constants.push_back(c.get<std::string>());

  ReasonerPopulation pop;
  try {
    pop.problem = ProblemInstance::make(std::move(premises),
                                        std::move(query_text), std::move(query),
                                        std::move(constants));
  } catch (const Error& e) {
    throw DatasetError(at + e.what());
  }

  const json& jprops = field(root, "propositions", at);
  if (!jprops.is_array() || jprops.empty())
    throw DatasetError(at + "'propositions' must be a non-empty array");
  for (const json& p : jprops) {
    if (!p.is_string())
      throw DatasetError(at + "'propositions' entries must be atom strings");
    FormulaPtr f;
    try {
      f = parse_formula(p.get<std::string>());
    } catch (const ParseError& e) {
      throw DatasetError(at + "proposition does not parse: " + e.what());
    }
    if (f->kind() != Kind::Atom)
      throw DatasetError(at + "proposition '" + p.get<std::string>() +
                         "' must be a single atom");
    pop.propositions.push_back(f->atom());
  }

  const json& jreas = field(root, "reasoners", at);
  if (!jreas.is_array() || jreas.empty())
    throw DatasetError(at + "'reasoners' must be a non-empty array");
  for (size_t i = 0; i < jreas.size(); ++i) {
    std::string rat = at + "reasoner " + std::to_string(i + 1) + ": ";
    const json& jbeliefs = field(jreas[i], "beliefs", rat);
    if (!jbeliefs.is_array())
      throw DatasetError(rat + "'beliefs' must be an array of stances");
    Reasoner reasoner;
    for (const json& b : jbeliefs) {
      if (!b.is_string())
        throw DatasetError(rat + "'beliefs' entries must be strings");
      reasoner.beliefs.push_back(epistemic_from_string(b.get<std::string>(), rat));
    }
    reasoner.weight = weight_field(field(jreas[i], "weight", rat), rat);
    pop.reasoners.push_back(std::move(reasoner));
  }

  try {
    pop.validate();
  } catch (const Error& e) {
    throw DatasetError(at + e.what());
  }
  pop.normalize_weights();
  return pop;
}

DatasetRecord record_from_population(const ReasonerPopulation& population,
                                     std::string id) {
  DatasetRecord rec;
  rec.id = std::move(id);
  rec.premises = population.problem.premises;
  rec.query_text = population.problem.query_text;
  rec.query_logic = population.problem.query;
  rec.constants = population.problem.constants;
  rec.label = exact_ap_rational(population) > Rational(1, 2);
  return rec;
}

Method method_from_string(const std::string& s) {
  if (s == "pacs") return Method::Pacs;
  if (s == "cot") return Method::Cot;
  if (s == "sc") return Method::Sc;
  throw Error("unknown method '" + s + "' (expected pacs, cot, or sc)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Pacs: return "pacs";
    case Method::Cot: return "cot";
    case Method::Sc: return "sc";
  }
  return "?";
}

SamplerFactory scripted_sampler_factory(ScriptMap scripts) {
  auto shared = std::make_shared<ScriptMap>(std::move(scripts));
  return [shared](const DatasetRecord& rec, std::uint64_t) {
    auto it = shared->find(rec.id);
    if (it == shared->end())
      throw DatasetError("no script for record '" + rec.id + "'");
    return make_scripted_sampler(it->second);
  };
}

SamplerFactory population_sampler_factory(ReasonerPopulation population,
                                          std::vector<int> order) {
  if (order.empty()) {
    order.resize(population.propositions.size());
    std::iota(order.begin(), order.end(), 0);
  }
  auto pop = std::make_shared<ReasonerPopulation>(std::move(population));
  return [pop, order](const DatasetRecord&, std::uint64_t seed) {
    return std::make_shared<PopulationSampler>(*pop, order, seed);
  };
}

SamplerFactory shared_sampler_factory(std::shared_ptr<Sampler> sampler) {
  if (!sampler) throw Error("shared_sampler_factory needs a sampler");
  return [sampler](const DatasetRecord&, std::uint64_t) { return sampler; };
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) throw Error("wilson_interval needs at least one trial");
  if (successes < 0 || successes > trials)
    throw Error("wilson_interval successes out of range");
  double p = static_cast<double>(successes) / trials;
  double z2 = z * z;
  double denom = 1.0 + z2 / trials;
  double center = (p + z2 / (2.0 * trials)) / denom;
  double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / trials +
                              z2 / (4.0 * static_cast<double>(trials) * trials));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

MetricSet compute_metrics(const std::vector<RecordResult>& records) {
  if (records.empty()) throw Error("compute_metrics needs at least one record");
  int n = static_cast<int>(records.size());
  int correct = 0, never_correct = 0;
  long long paths = 0, calls = 0;
  double depth_sum = 0.0;
  for (const auto& r : records) {
    correct += r.correct ? 1 : 0;
    never_correct += (r.label ? r.votes_true : r.votes_false) == 0 ? 1 : 0;
    for (int d : r.path_depths) depth_sum += d;
    paths += static_cast<long long>(r.path_depths.size());
    calls += r.sampler_calls;
  }
  MetricSet m;
  m.accuracy = static_cast<double>(correct) / n;
  std::tie(m.ci_low, m.ci_high) = wilson_interval(correct, n);
  m.never_correct_rate = static_cast<double>(never_correct) / n;
  m.mean_path_length = paths ? depth_sum / static_cast<double>(paths) : 0.0;
  m.mean_sampler_calls = static_cast<double>(calls) / n;
  return m;
}

RunReport run_eval(const std::vector<DatasetRecord>& dataset,
                   const EvalConfig& config, const SamplerFactory& factory,
                   TraceWriter* trace) {
  RunReport report;
  report.config = config;
  report.dataset_size = static_cast<int>(dataset.size());
  report.records.resize(dataset.size());

  auto t0 = std::chrono::steady_clock::now();
  int workers = std::max(1, config.workers);
  workers = std::min<int>(workers, std::max<size_t>(dataset.size(), 1));
  if (workers <= 1) {
    for (size_t i = 0; i < dataset.size(); ++i)
      report.records[i] = eval_record(dataset[i], config, factory, trace);
  } else {
    std::atomic<size_t> next{0};
    auto work = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= dataset.size()) return;
        report.records[i] = eval_record(dataset[i], config, factory, trace);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!report.records.empty()) report.metrics = compute_metrics(report.records);
  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

void write_report(std::ostream& os, const RunReport& report) {
  json run{{"type", "run"},
           {"method", to_string(report.config.method)},
           {"seed", report.config.seed},
           {"k", report.config.k},
           {"n", report.config.search.n},
           {"m", report.config.search.m},
           {"max_steps", report.config.search.max_steps},
           {"time_limit_ms", report.config.search.wall_time_limit.count()},
           {"atom_budget", report.config.search.max_new_atoms_per_thought},
           {"score_vocab_includes_query",
            report.config.search.score_vocab_includes_query},
           {"workers", report.config.workers},
           {"dataset_size", report.dataset_size},
           {"wall_ms", report.wall_ms}};
  os << run.dump() << '\n';
  for (const auto& r : report.records) os << record_json(r).dump() << '\n';
  if (!report.records.empty()) {
    json metrics{{"type", "metrics"},
                 {"accuracy", report.metrics.accuracy},
                 {"ci_low", report.metrics.ci_low},
                 {"ci_high", report.metrics.ci_high},
                 {"never_correct_rate", report.metrics.never_correct_rate},
                 {"mean_path_length", report.metrics.mean_path_length},
                 {"mean_sampler_calls", report.metrics.mean_sampler_calls}};
    os << metrics.dump() << '\n';
  }
  os.flush();
}

}  // namespace pacs
