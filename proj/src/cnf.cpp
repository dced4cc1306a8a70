#include "pacs/cnf.hpp"

#include <ostream>

namespace pacs {

namespace {

// Removes ConstTrue/ConstFalse from strict subterms; the result is either
// a bare constant or a formula with no constant nodes inside.
FormulaPtr fold(const FormulaPtr& f) {
  switch (f->kind()) {
    case Kind::Atom:
    case Kind::ConstTrue:
    case Kind::ConstFalse:
      return f;
    case Kind::Not: {
      FormulaPtr g = fold(f->operands()[0]);
      if (g->kind() == Kind::ConstTrue) return Formula::make_const(false);
      if (g->kind() == Kind::ConstFalse) return Formula::make_const(true);
      return Formula::make_not(std::move(g));
    }
    case Kind::And:
    case Kind::Or: {
      bool is_and = f->kind() == Kind::And;
      std::vector<FormulaPtr> ops;
      for (const auto& g0 : f->operands()) {
        FormulaPtr g = fold(g0);
        if (g->kind() == Kind::ConstTrue) {
          if (!is_and) return g;
          continue;
        }
        if (g->kind() == Kind::ConstFalse) {
          if (is_and) return g;
          continue;
        }
        ops.push_back(std::move(g));
      }
      if (ops.empty()) return Formula::make_const(is_and);
      if (ops.size() == 1) return ops[0];
      return is_and ? Formula::make_and(std::move(ops))
                    : Formula::make_or(std::move(ops));
    }
    case Kind::Implies: {
      FormulaPtr a = fold(f->operands()[0]);
      FormulaPtr b = fold(f->operands()[1]);
      if (a->kind() == Kind::ConstFalse) return Formula::make_const(true);
      if (a->kind() == Kind::ConstTrue) return b;
      if (b->kind() == Kind::ConstTrue) return Formula::make_const(true);
      if (b->kind() == Kind::ConstFalse) return fold(Formula::make_not(a));
      return Formula::make_implies(std::move(a), std::move(b));
    }
    case Kind::Iff: {
      FormulaPtr a = fold(f->operands()[0]);
      FormulaPtr b = fold(f->operands()[1]);
      if (a->kind() == Kind::ConstTrue) return b;
      if (b->kind() == Kind::ConstTrue) return a;
      if (a->kind() == Kind::ConstFalse) return fold(Formula::make_not(b));
      if (b->kind() == Kind::ConstFalse) return fold(Formula::make_not(a));
      return Formula::make_iff(std::move(a), std::move(b));
    }
    case Kind::ForAll:
      throw Error("formula must be grounded before CNF conversion");
  }
  throw Error("unreachable");
}

class Encoder {
public:
  Encoder(const Vocabulary& vocab) : vocab_(vocab) {
    cs_.num_original = vocab.size();
    cs_.num_vars = vocab.size();
  }

  ClauseSet take() { return std::move(cs_); }

  void add_clause(std::vector<int> lits) { cs_.clauses.push_back({std::move(lits)}); }

  int fresh_var() { return cs_.num_vars++; }

  // Literal whose value equals the subformula's value in every model.
  int encode(const FormulaPtr& f) {
    switch (f->kind()) {
      case Kind::Atom: {
        int v = vocab_.index_of(f->atom());
        if (v < 0)
          throw Error("atom not in vocabulary: " + f->atom().str());
        return v + 1;
      }
      case Kind::Not:
        return -encode(f->operands()[0]);
      case Kind::And:
      case Kind::Or: {
        bool is_and = f->kind() == Kind::And;
        std::vector<int> ls;
        ls.reserve(f->operands().size());
        for (const auto& g : f->operands()) ls.push_back(encode(g));
        int z = fresh_var() + 1;
        std::vector<int> big;
        big.push_back(is_and ? z : -z);
        for (int l : ls) {
          add_clause({is_and ? -z : z, is_and ? l : -l});
          big.push_back(is_and ? -l : l);
        }
        add_clause(std::move(big));
        return z;
      }
      case Kind::Implies: {
        int a = encode(f->operands()[0]);
        int b = encode(f->operands()[1]);
        int z = fresh_var() + 1;
        add_clause({-z, -a, b});
        add_clause({z, a});
        add_clause({z, -b});
        return z;
      }
      case Kind::Iff: {
        int a = encode(f->operands()[0]);
        int b = encode(f->operands()[1]);
        int z = fresh_var() + 1;
        add_clause({-z, -a, b});
        add_clause({-z, a, -b});
        add_clause({z, a, b});
        add_clause({z, -a, -b});
        return z;
      }
      default:
        throw Error("constant inside encoded formula");
    }
  }

  // Asserts a folded formula without introducing a root gate.
  void assert_true(const FormulaPtr& f) {
    switch (f->kind()) {
      case Kind::ConstTrue:
        return;
      case Kind::ConstFalse:
        add_clause({});
        return;
      case Kind::And:
        for (const auto& g : f->operands()) assert_true(g);
        return;
      case Kind::Or: {
        std::vector<int> lits;
        for (const auto& g : f->operands()) lits.push_back(encode(g));
        add_clause(std::move(lits));
        return;
      }
      case Kind::Implies: {
        int a = encode(f->operands()[0]);
        int b = encode(f->operands()[1]);
        add_clause({-a, b});
        return;
      }
      case Kind::Iff: {
        int a = encode(f->operands()[0]);
        int b = encode(f->operands()[1]);
        add_clause({-a, b});
        add_clause({a, -b});
        return;
      }
      default:
        add_clause({encode(f)});
        return;
    }
  }

private:
  const Vocabulary& vocab_;
  ClauseSet cs_;
};

}  // namespace

ClauseSet to_cnf(std::span<const FormulaPtr> formulas, const Vocabulary& vocab) {
  Encoder enc(vocab);
  for (const auto& f : formulas) enc.assert_true(fold(f));
  return enc.take();
}

EncodedQuery encode_with_query(std::span<const FormulaPtr> state,
                               const FormulaPtr& query,
                               const Vocabulary& vocab) {
  Encoder enc(vocab);
  for (const auto& f : state) enc.assert_true(fold(f));
  EncodedQuery out;
  FormulaPtr q = fold(query);
  if (q->kind() == Kind::ConstTrue || q->kind() == Kind::ConstFalse) {
    out.query_const = true;
    out.query_const_value = q->kind() == Kind::ConstTrue;
  } else {
    out.query_lit = enc.encode(q);
  }
  out.cs = enc.take();
  return out;
}

void ClauseSet::to_dimacs(std::ostream& os, const Vocabulary* vocab) const {
  if (vocab) {
    for (int i = 0; i < vocab->size(); ++i)
      os << "c var " << (i + 1) << " = " << vocab->atoms()[i].str() << "\n";
  }
  os << "p cnf " << num_vars << ' ' << clauses.size() << "\n";
  for (const auto& c : clauses) {
    for (int l : c.lits) os << l << ' ';
    os << "0\n";
  }
}

}  // namespace pacs
