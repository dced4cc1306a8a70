#pragma once

#include <compare>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacs/errors.hpp"

namespace pacs {

/// A ground predicate application: `pred(c1, ..., ck)` with k >= 0.
/// Identity is syntactic: two atoms are equal iff predicate and argument
/// lists are equal.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;

  /// Canonical form: `pred(a, b)`, or bare `pred` when there are no args.
  std::string str() const;
};

enum class Kind {
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  ConstTrue,
  ConstFalse,
  ForAll,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable expression tree. ForAll may appear only at the top level of a
/// premise and binds a single variable over a finite constant set; all
/// other nodes are quantifier-free.
class Formula {
public:
  Kind kind() const { return kind_; }
  const Atom& atom() const { return atom_; }
  const std::string& bound_var() const { return bound_var_; }
  const std::vector<FormulaPtr>& operands() const { return operands_; }

  static FormulaPtr make_atom(Atom a);
  static FormulaPtr make_not(FormulaPtr f);
  static FormulaPtr make_and(std::vector<FormulaPtr> fs);
  static FormulaPtr make_or(std::vector<FormulaPtr> fs);
  static FormulaPtr make_implies(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr make_iff(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr make_const(bool value);
  static FormulaPtr make_forall(std::string var, FormulaPtr body);

private:
  Formula() = default;

  Kind kind_ = Kind::ConstTrue;
  Atom atom_;
  std::string bound_var_;
  std::vector<FormulaPtr> operands_;
};

/// Structural equality.
bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// Parse the function-style grammar: `Implies(x, y)`, `And(...)`,
/// `Or(...)`, `Not(x)`, `Iff(x, y)`, `True`, `False`, `ForAll(v, body)`,
/// atoms as `pred(args)` or bare `pred`. Whitespace-insensitive.
/// Throws ParseError with position and an expected-token hint.
FormulaPtr parse_formula(std::string_view text);

/// Canonical text: function-style with a single space after commas.
/// parse_formula(render_formula(f)) is structurally equal to f.
std::string render_formula(const FormulaPtr& f);

/// Expand a top-level ForAll over the constant set, preserving order and
/// skipping duplicate constants. Non-quantified formulas are returned
/// unchanged as a singleton list. Throws on ForAll with no constants.
std::vector<FormulaPtr> ground(const FormulaPtr& f,
                               const std::vector<std::string>& constants);

/// Ordered atom universe of a problem state. Ordering is insertion order
/// of first appearance, so two walks over the same formulas agree.
class Vocabulary {
public:
  /// Returns the atom's index, inserting it if new.
  int add(const Atom& a);
  /// Adds every atom of `f` in depth-first, left-to-right order.
  void add_formula(const FormulaPtr& f);
  /// Index of `a`, or -1 if absent.
  int index_of(const Atom& a) const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<std::string>& constants() const { return constants_; }
  int size() const { return static_cast<int>(atoms_.size()); }

private:
  std::vector<Atom> atoms_;
  std::map<Atom, int> index_;
  std::vector<std::string> constants_;
  std::map<std::string, int> constant_index_;
};

/// Vocabulary over a list of formulas, in list order.
Vocabulary vocabulary_of(std::span<const FormulaPtr> formulas);

/// All atoms of `f`, appended to `out` in first-appearance order.
void collect_atoms(const FormulaPtr& f, std::vector<Atom>& out);

}  // namespace pacs
