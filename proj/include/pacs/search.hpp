#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "pacs/engine.hpp"
#include "pacs/problem.hpp"
#include "pacs/sampler.hpp"

namespace pacs {

struct SearchConfig {
  int n = 3;                      // candidates requested per expansion
  int m = 2;                      // beam width
  int max_steps = 8;              // expansion steps per problem
  std::chrono::milliseconds wall_time_limit{120000};
  int max_new_atoms_per_thought = 4;
  bool score_vocab_includes_query = true;
  std::uint64_t random_seed = 0;
  int counting_cap = 26;
};

/// What ended a completed path: the solver entailing the query (or its
/// negation), the sampler declaring a final answer, or both at once.
enum class StopReason { SolverEntailed, SamplerFinal, Both };

std::string to_string(StopReason r);

/// One early-stopped reasoning chain with a resolved answer, i.e. one
/// Monte-Carlo sample feeding the vote. depth = |chain| (a terminal
/// answer thought counts as a step); score_trace has depth+1 entries,
/// starting with the premises-only score.
struct CompletedPath {
  std::vector<Thought> chain;
  bool answer = false;
  StopReason stop_reason = StopReason::SolverEntailed;
  bool conflict = false;  // sampler declared one answer, solver proved the other
  std::vector<ScoreBreakdown> score_trace;
  int depth = 0;
};

/// One live beam entry. vocab always contains the query's atoms (the
/// entailment check needs them); score_vocab drops them when configured.
struct BeamState {
  std::vector<Thought> chain;
  std::vector<FormulaPtr> state_formulas;
  Vocabulary vocab;
  Vocabulary score_vocab;
  ScoreBreakdown score;
  int depth = 0;
  std::vector<ScoreBreakdown> score_trace;
};

struct SearchStats {
  int steps = 0;
  int sampler_calls = 0;
  int candidates_seen = 0;
  int dropped_inconsistent = 0;
  int dropped_atom_budget = 0;
  int dropped_beam = 0;
  bool hit_step_limit = false;
  bool hit_time_limit = false;
  bool sampler_exhausted = false;
};

/// Thread-safe line sink for JSONL traces.
class TraceWriter {
public:
  explicit TraceWriter(std::ostream& os) : os_(&os) {}
  void line(const std::string& json_line);

private:
  std::ostream* os_;
  std::mutex mu_;
};

struct Expansion {
  std::vector<BeamState> survivors;
  std::vector<CompletedPath> completed;
};

/// Expands one beam state with up to config.n sampled candidates:
/// finals complete immediately (the solver's verdict, when one exists,
/// overrides a disagreeing declared answer and flags the conflict);
/// intermediate thoughts are grounded, budget-checked, consistency-
/// checked, and either complete the path (query resolved) or join the
/// survivors, scored.
Expansion expand_state(const BeamState& state, const ProblemInstance& problem,
                       Sampler& sampler, const SearchConfig& config,
                       SearchStats* stats = nullptr, TraceWriter* trace = nullptr,
                       int step = 0, int beam_index = 0);

/// The full beam search: seeds the beam with the premises (short-
/// circuiting problems the premises already decide), expands every beam
/// state each step, keeps the m lowest-scoring survivors, and stops on
/// max_steps, the time limit, beam exhaustion, or sampler exhaustion.
/// Returns every completed path collected, in completion order. Throws
/// NoPathsFound when that set is empty.
std::vector<CompletedPath> run_search(const ProblemInstance& problem,
                                      Sampler& sampler, const SearchConfig& config,
                                      TraceWriter* trace = nullptr,
                                      SearchStats* stats = nullptr);

}  // namespace pacs
