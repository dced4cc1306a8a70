#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pacs/estimator.hpp"
#include "pacs/population.hpp"
#include "pacs/problem.hpp"
#include "pacs/sampler.hpp"
#include "pacs/search.hpp"

namespace pacs {

/// One evaluation problem as stored on disk: pre-translated premises, a
/// query, and its gold label. Natural-language-to-logic translation of the
/// problem statement happens upstream; thought translation stays with the
/// sampler.
struct DatasetRecord {
  std::string id;
  std::vector<Premise> premises;
  std::string query_text;
  FormulaPtr query_logic;
  bool label = false;
  std::vector<std::string> constants;  // extra grounding constants

  ProblemInstance problem() const;
};

struct DatasetDiagnostic {
  int line = 0;  // 1-based; 0 for file-level notes
  std::string message;
};

/// Reads UTF-8 line-delimited records with exactly the DatasetRecord field
/// names. Strict mode throws DatasetError at the first bad line; lenient
/// mode records a diagnostic and skips it. An empty file yields an empty
/// list plus a warning diagnostic, in both modes.
std::vector<DatasetRecord> load_dataset(
    const std::string& path, bool strict = true,
    std::vector<DatasetDiagnostic>* diagnostics = nullptr);

/// Replay scripts for the scripted sampler, one per record id.
using ScriptMap = std::map<std::string, Script>;

ScriptMap load_script(const std::string& path);

ReasonerPopulation load_population(const std::string& path);

/// A single-record dataset view of a population's embedded problem, with
/// the label the population's own acceptance probability dictates.
DatasetRecord record_from_population(const ReasonerPopulation& population,
                                     std::string id);

enum class Method { Pacs, Cot, Sc };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

/// Produces the sampler evaluating one record. Called once per record by
/// the search method and once per chain by the baselines, so stochastic
/// samplers can give every chain its own stream.
using SamplerFactory = std::function<std::shared_ptr<Sampler>(
    const DatasetRecord&, std::uint64_t seed)>;

SamplerFactory scripted_sampler_factory(ScriptMap scripts);
SamplerFactory population_sampler_factory(ReasonerPopulation population,
                                          std::vector<int> order = {});
/// Wraps one sampler that serves every record and chain (the live-LLM
/// case; the seed is ignored).
SamplerFactory shared_sampler_factory(std::shared_ptr<Sampler> sampler);

struct EvalConfig {
  Method method = Method::Pacs;
  SearchConfig search;  // beam knobs; max_steps also caps baseline chains
  int k = 20;           // chains sampled per record by sc (cot pins 1)
  std::uint64_t seed = 0;
  int workers = 1;
};

struct RecordResult {
  std::string id;
  bool label = false;
  Verdict verdict = Verdict::Abstain;
  bool correct = false;
  double ap_hat = 0.0;
  int k = 0;  // votes actually cast
  int votes_true = 0;
  int votes_false = 0;
  std::vector<int> path_depths;
  std::vector<std::string> stop_reasons;
  int conflicts = 0;
  int sampler_calls = 0;
  std::int64_t wall_ms = 0;
  std::string error;  // empty on clean records
};

struct MetricSet {
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double never_correct_rate = 0.0;
  double mean_path_length = 0.0;
  double mean_sampler_calls = 0.0;
};

/// Wilson score interval; z defaults to the 95% quantile.
std::pair<double, double> wilson_interval(int successes, int trials,
                                          double z = 1.96);

/// Aggregates per-record rows: accuracy (Abstain counts incorrect) with
/// its Wilson interval, the fraction of records none of whose paths voted
/// the gold answer, the pooled mean completed-path depth, and the mean
/// sampler-call count. Throws Error on an empty row list.
MetricSet compute_metrics(const std::vector<RecordResult>& records);

struct RunReport {
  EvalConfig config;
  int dataset_size = 0;
  std::vector<RecordResult> records;
  MetricSet metrics;
  std::int64_t wall_ms = 0;
};

/// Evaluates every record. The search method runs the beam search and the
/// vote estimate; cot samples one unguided chain per record and sc samples
/// config.k of them, majority-voting the declared answers. Per-record
/// failures land in RecordResult::error with an Abstain verdict and never
/// abort the batch. Records run across config.workers threads; results
/// keep dataset order.
RunReport run_eval(const std::vector<DatasetRecord>& dataset,
                   const EvalConfig& config, const SamplerFactory& factory,
                   TraceWriter* trace = nullptr);

/// One structured line per row: a run header, each record, then the
/// aggregate metrics (recomputable from the record rows). Byte-identical
/// across reruns except for wall_ms fields.
void write_report(std::ostream& os, const RunReport& report);

}  // namespace pacs
