#pragma once

#include <string>
#include <vector>

#include "pacs/logic.hpp"

namespace pacs {

/// One premise as it appears in a prompt: a natural-language line and its
/// logic translation (which may be a top-level ForAll rule).
struct Premise {
  std::string text;
  FormulaPtr logic;
};

/// A fully prepared query-answering problem: surface premises for prompt
/// building, their grounded expansion for the solver, and the constant
/// universe used to ground any quantified thought sampled later.
struct ProblemInstance {
  std::vector<Premise> premises;
  std::vector<FormulaPtr> grounded;
  std::string query_text;
  FormulaPtr query;
  std::vector<std::string> constants;

  /// Grounds the premises over the constants found in the premises and
  /// query plus `extra_constants` (order: first appearance, extras last).
  /// The query itself must be quantifier-free.
  static ProblemInstance make(std::vector<Premise> premises,
                              std::string query_text, FormulaPtr query,
                              std::vector<std::string> extra_constants = {});

  /// Expands a sampled thought's formula over this problem's constant
  /// universe (identity for quantifier-free formulas).
  std::vector<FormulaPtr> ground_thought(const FormulaPtr& f) const;
};

}  // namespace pacs
