#include "pacs/problem.hpp"

#include <set>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

void collect_constants(const FormulaPtr& f, const std::string& bound,
                       std::vector<std::string>& out,
                       std::set<std::string>& seen) {
  if (f->kind() == Kind::Atom) {
    for (const auto& arg : f->atom().args) {
      if (arg == bound) continue;
      if (seen.insert(arg).second) out.push_back(arg);
    }
    return;
  }
  if (f->kind() == Kind::ForAll) {
    collect_constants(f->operands()[0], f->bound_var(), out, seen);
    return;
  }
  for (const auto& g : f->operands()) collect_constants(g, bound, out, seen);
}

}  // namespace

ProblemInstance ProblemInstance::make(std::vector<Premise> premises,
                                      std::string query_text, FormulaPtr query,
                                      std::vector<std::string> extra_constants) {
  if (!query) throw Error("problem has no query");
  if (query->kind() == Kind::ForAll)
    throw Error("query must be quantifier-free");
  ProblemInstance p;
  p.premises = std::move(premises);
  p.query_text = std::move(query_text);
  p.query = std::move(query);

  std::set<std::string> seen;
  for (const auto& pr : p.premises) {
    if (!pr.logic) throw Error("premise has no logic form");
    collect_constants(pr.logic, "", p.constants, seen);
  }
  collect_constants(p.query, "", p.constants, seen);
  for (const auto& c : extra_constants)
    if (seen.insert(c).second) p.constants.push_back(c);

  for (const auto& pr : p.premises) {
    auto parts = ground(pr.logic, p.constants);
    p.grounded.insert(p.grounded.end(), parts.begin(), parts.end());
  }
  return p;
}

std::vector<FormulaPtr> ProblemInstance::ground_thought(const FormulaPtr& f) const {
  return ground(f, constants);
}

}  // namespace pacs
