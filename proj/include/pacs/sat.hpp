#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pacs/cnf.hpp"

namespace pacs {

struct SatResult {
  bool sat = false;
  /// Truth value per variable (0-based), size num_vars; valid only when sat.
  std::vector<bool> model;
};

/// One-shot CDCL solve. Assumptions are DIMACS-style literals enqueued
/// before search; the result says whether the clause set is satisfiable
/// under all of them. Each call builds an independent solver, so any
/// number of calls may run concurrently.
SatResult solve_cnf(const ClauseSet& cs, std::span<const int> assumptions = {});

/// Exact model count over the ORIGINAL variables: satisfying total
/// assignments of vars [0, num_original), each extended by the (unique)
/// consistent auxiliary assignment. Counting DPLL with unit propagation;
/// branches only on variables of not-yet-satisfied clauses and multiplies
/// by 2^k for the k original variables left unconstrained at a leaf.
/// Throws VocabularyTooLarge when num_original > 62 (count could overflow).
std::uint64_t count_models(const ClauseSet& cs);

}  // namespace pacs
