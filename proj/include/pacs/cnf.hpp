#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pacs/logic.hpp"

namespace pacs {

/// One disjunction of DIMACS-style literals: +-(var+1), var 0-based.
struct Clause {
  std::vector<int> lits;
};

/// Equisatisfiable CNF of a grounded state. Variables [0, num_original)
/// correspond to vocabulary atoms in vocabulary order; the rest are
/// Tseitin auxiliaries. Every gate is encoded with its full biconditional
/// definition, so each total assignment of the original variables that
/// satisfies the source extends to exactly one model of the clause set.
struct ClauseSet {
  int num_vars = 0;
  int num_original = 0;
  std::vector<Clause> clauses;

  /// Standard `p cnf` output. When a vocabulary is given, atoms are named
  /// in comment lines.
  void to_dimacs(std::ostream& os, const Vocabulary* vocab = nullptr) const;
};

/// CNF-convert grounded formulas, asserting each as true. Every atom of
/// every formula must already be in `vocab`.
ClauseSet to_cnf(std::span<const FormulaPtr> formulas, const Vocabulary& vocab);

/// Like to_cnf, but additionally encodes `query` WITHOUT asserting it and
/// returns the literal of its root, so callers can assume either polarity.
struct EncodedQuery {
  ClauseSet cs;
  int query_lit = 0;  // 0 when the query folded to a constant
  bool query_const = false;
  bool query_const_value = false;
};
EncodedQuery encode_with_query(std::span<const FormulaPtr> state,
                               const FormulaPtr& query,
                               const Vocabulary& vocab);

}  // namespace pacs
