#include "pacs/engine.hpp"

#include "pacs/errors.hpp"
#include "pacs/sat.hpp"

namespace pacs {

namespace {

// Backbone probing on a prebuilt clause set: take any model as the
// candidate polarity for every original variable, then refute candidates.
// One UNSAT probe confirms a backbone; each SAT probe's model prunes every
// candidate it disagrees with.
int backbone_of(const ClauseSet& cs, const std::vector<bool>& first_model) {
  int n = cs.num_original;
  std::vector<bool> cand(first_model.begin(), first_model.begin() + n);
  std::vector<char> alive(n, 1);
  int count = 0;
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    int probe = cand[v] ? -(v + 1) : (v + 1);
    SatResult r = solve_cnf(cs, std::span<const int>(&probe, 1));
    if (!r.sat) {
      ++count;
      continue;
    }
    for (int u = 0; u < n; ++u)
      if (alive[u] && r.model[u] != cand[u]) alive[u] = 0;
  }
  return count;
}

}  // namespace

std::string to_string(TruthValue v) {
  switch (v) {
    case TruthValue::True:
      return "True";
    case TruthValue::False:
      return "False";
    default:
      return "Unknown";
  }
}

bool is_satisfiable(std::span<const FormulaPtr> state, const Vocabulary& vocab) {
  return solve_cnf(to_cnf(state, vocab)).sat;
}

TruthValue truth_value(const FormulaPtr& query,
                       std::span<const FormulaPtr> state,
                       const Vocabulary& vocab) {
  EncodedQuery enc = encode_with_query(state, query, vocab);
  if (!solve_cnf(enc.cs).sat)
    throw InconsistentContext("truth value undefined: the context is unsatisfiable");
  if (enc.query_const)
    return enc.query_const_value ? TruthValue::True : TruthValue::False;
  int lit = -enc.query_lit;
  if (!solve_cnf(enc.cs, std::span<const int>(&lit, 1)).sat) return TruthValue::True;
  lit = enc.query_lit;
  if (!solve_cnf(enc.cs, std::span<const int>(&lit, 1)).sat) return TruthValue::False;
  return TruthValue::Unknown;
}

std::uint64_t model_count(std::span<const FormulaPtr> state,
                          const Vocabulary& vocab,
                          const EngineOptions& options) {
  if (vocab.size() > options.counting_cap)
    throw VocabularyTooLarge("exact counting capped at " +
                             std::to_string(options.counting_cap) + " atoms, got " +
                             std::to_string(vocab.size()));
  return count_models(to_cnf(state, vocab));
}

int backbone_count(std::span<const FormulaPtr> state, const Vocabulary& vocab) {
  ClauseSet cs = to_cnf(state, vocab);
  SatResult r = solve_cnf(cs);
  if (!r.sat)
    throw InconsistentContext("backbone undefined: the state is unsatisfiable");
  return backbone_of(cs, r.model);
}

ScoreBreakdown score_state(std::span<const FormulaPtr> state,
                           const Vocabulary& vocab,
                           const EngineOptions& options) {
  if (vocab.size() > options.counting_cap)
    throw VocabularyTooLarge("exact counting capped at " +
                             std::to_string(options.counting_cap) + " atoms, got " +
                             std::to_string(vocab.size()));
  ClauseSet cs = to_cnf(state, vocab);
  SatResult r = solve_cnf(cs);
  if (!r.sat)
    throw InconsistentContext("score undefined: the state is unsatisfiable");
  ScoreBreakdown b;
  b.var_count = vocab.size();
  b.model_count = count_models(cs);
  b.backbone_count = backbone_of(cs, r.model);
  b.score = b.model_count * static_cast<std::uint64_t>(b.var_count - b.backbone_count) + 1;
  return b;
}

}  // namespace pacs
