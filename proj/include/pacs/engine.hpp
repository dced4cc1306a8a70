#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "pacs/cnf.hpp"
#include "pacs/logic.hpp"

namespace pacs {

/// Three-valued entailment status of a query under a consistent context.
enum class TruthValue { True, False, Unknown };

std::string to_string(TruthValue v);

struct EngineOptions {
  /// Hard cap on |vocab| for exact counting; beyond it the operation
  /// throws VocabularyTooLarge instead of approximating.
  int counting_cap = 26;
};

/// The greedy search heuristic: score = model_count * (var_count -
/// backbone_count) + 1, where var_count is the size of the scoring
/// vocabulary and backbone_count the number of its atoms fixed to one
/// value across all models of the state.
struct ScoreBreakdown {
  std::uint64_t model_count = 0;
  int var_count = 0;
  int backbone_count = 0;
  std::uint64_t score = 0;
};

/// True iff some assignment over vocab satisfies every formula.
bool is_satisfiable(std::span<const FormulaPtr> state, const Vocabulary& vocab);

/// True iff state entails query; False iff state entails its negation;
/// Unknown otherwise. Throws InconsistentContext on unsatisfiable state
/// (both branches would fire, so no TruthValue is meaningful).
TruthValue truth_value(const FormulaPtr& query,
                       std::span<const FormulaPtr> state,
                       const Vocabulary& vocab);

/// Satisfying assignments of the conjunction over vocab.atoms, counting
/// atoms the state never mentions as free. Throws VocabularyTooLarge
/// past options.counting_cap.
std::uint64_t model_count(std::span<const FormulaPtr> state,
                          const Vocabulary& vocab,
                          const EngineOptions& options = {});

/// Number of vocab atoms taking the same value in every model of the
/// state. Throws InconsistentContext on unsatisfiable state.
int backbone_count(std::span<const FormulaPtr> state, const Vocabulary& vocab);

/// Full breakdown for a consistent state: one CNF build shared by the
/// consistency check, the count, and the backbone probes.
ScoreBreakdown score_state(std::span<const FormulaPtr> state,
                           const Vocabulary& vocab,
                           const EngineOptions& options = {});

}  // namespace pacs
