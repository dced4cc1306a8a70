#include "pacs/logic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace pacs {

std::string Atom::str() const {
  if (args.empty()) return predicate;
  std::string out = predicate;
  out += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i];
  }
  out += ')';
  return out;
}

FormulaPtr Formula::make_atom(Atom a) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Atom;
  f->atom_ = std::move(a);
  return f;
}

FormulaPtr Formula::make_not(FormulaPtr g) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->operands_ = {std::move(g)};
  return f;
}

FormulaPtr Formula::make_and(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw Error("And requires at least one operand");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::And;
  f->operands_ = std::move(fs);
  return f;
}

FormulaPtr Formula::make_or(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw Error("Or requires at least one operand");
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Or;
  f->operands_ = std::move(fs);
  return f;
}

FormulaPtr Formula::make_implies(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Implies;
  f->operands_ = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::make_iff(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Iff;
  f->operands_ = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::make_const(bool value) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = value ? Kind::ConstTrue : Kind::ConstFalse;
  return f;
}

FormulaPtr Formula::make_forall(std::string var, FormulaPtr body) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::ForAll;
  f->bound_var_ = std::move(var);
  f->operands_ = {std::move(body)};
  return f;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Kind::Atom:
      return a->atom() == b->atom();
    case Kind::ConstTrue:
    case Kind::ConstFalse:
      return true;
    case Kind::ForAll:
      if (a->bound_var() != b->bound_var()) return false;
      [[fallthrough]];
    default: {
      const auto& xs = a->operands();
      const auto& ys = b->operands();
      if (xs.size() != ys.size()) return false;
      for (size_t i = 0; i < xs.size(); ++i)
        if (!equal(xs[i], ys[i])) return false;
      return true;
    }
  }
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(std::string_view s) {
  return s == "And" || s == "Or" || s == "Not" || s == "Implies" ||
         s == "Iff" || s == "True" || s == "False" || s == "ForAll";
}

// Recursive-descent parser over the raw text; whitespace is skipped
// between tokens.
class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = expr(/*top_level=*/true);
    skip_ws();
    if (pos_ != text_.size())
      fail("expected end of input");
    return f;
  }

private:
  std::string_view text_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    std::string found;
    if (pos_ >= text_.size()) {
      found = "end of input";
    } else {
      found = std::string("'") + text_[pos_] + "'";
    }
    throw ParseError("parse error at position " + std::to_string(pos_) +
                         ": " + expected + ", found " + found,
                     pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
      fail("expected identifier");
    size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string constant_ident() {
    size_t at = pos_;
    std::string name = ident();
    if (is_keyword(name)) {
      pos_ = at;
      fail("expected constant identifier, not keyword '" + name + "'");
    }
    return name;
  }

  FormulaPtr expr(bool top_level) {
    skip_ws();
    size_t at = pos_;
    std::string head = ident();

    if (head == "True") return Formula::make_const(true);
    if (head == "False") return Formula::make_const(false);

    if (head == "Not") {
      expect('(');
      FormulaPtr g = expr(false);
      expect(')');
      return Formula::make_not(std::move(g));
    }
    if (head == "And" || head == "Or") {
      expect('(');
      std::vector<FormulaPtr> fs;
      fs.push_back(expr(false));
      while (eat(',')) fs.push_back(expr(false));
      expect(')');
      return head == "And" ? Formula::make_and(std::move(fs))
                           : Formula::make_or(std::move(fs));
    }
    if (head == "Implies" || head == "Iff") {
      expect('(');
      FormulaPtr lhs = expr(false);
      expect(',');
      FormulaPtr rhs = expr(false);
      expect(')');
      return head == "Implies" ? Formula::make_implies(std::move(lhs), std::move(rhs))
                               : Formula::make_iff(std::move(lhs), std::move(rhs));
    }
    if (head == "ForAll") {
      if (!top_level) {
        pos_ = at;
        fail("quantifier is only allowed at the top level");
      }
      expect('(');
      std::string var = constant_ident();
      expect(',');
      FormulaPtr body = expr(false);
      expect(')');
      return Formula::make_forall(std::move(var), std::move(body));
    }

    // Atom: `pred(args)` or bare `pred`.
    Atom a;
    a.predicate = std::move(head);
    if (eat('(')) {
      skip_ws();
      if (!eat(')')) {
        a.args.push_back(constant_ident());
        while (eat(',')) a.args.push_back(constant_ident());
        expect(')');
      }
    }
    return Formula::make_atom(std::move(a));
  }
};

void render(const FormulaPtr& f, std::string& out) {
  switch (f->kind()) {
    case Kind::Atom:
      out += f->atom().str();
      return;
    case Kind::ConstTrue:
      out += "True";
      return;
    case Kind::ConstFalse:
      out += "False";
      return;
    case Kind::Not:
      out += "Not(";
      render(f->operands()[0], out);
      out += ')';
      return;
    case Kind::ForAll:
      out += "ForAll(";
      out += f->bound_var();
      out += ", ";
      render(f->operands()[0], out);
      out += ')';
      return;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: {
      switch (f->kind()) {
        case Kind::And: out += "And("; break;
        case Kind::Or: out += "Or("; break;
        case Kind::Implies: out += "Implies("; break;
        default: out += "Iff("; break;
      }
      const auto& ops = f->operands();
      for (size_t i = 0; i < ops.size(); ++i) {
        if (i) out += ", ";
        render(ops[i], out);
      }
      out += ')';
      return;
    }
  }
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var,
                      const std::string& constant) {
  switch (f->kind()) {
    case Kind::Atom: {
      Atom a = f->atom();
      bool changed = false;
      for (auto& arg : a.args) {
        if (arg == var) {
          arg = constant;
          changed = true;
        }
      }
      return changed ? Formula::make_atom(std::move(a)) : f;
    }
    case Kind::ConstTrue:
    case Kind::ConstFalse:
      return f;
    case Kind::Not:
      return Formula::make_not(substitute(f->operands()[0], var, constant));
    case Kind::Implies:
      return Formula::make_implies(substitute(f->operands()[0], var, constant),
                                   substitute(f->operands()[1], var, constant));
    case Kind::Iff:
      return Formula::make_iff(substitute(f->operands()[0], var, constant),
                               substitute(f->operands()[1], var, constant));
    case Kind::And:
    case Kind::Or: {
      std::vector<FormulaPtr> ops;
      ops.reserve(f->operands().size());
      for (const auto& g : f->operands()) ops.push_back(substitute(g, var, constant));
      return f->kind() == Kind::And ? Formula::make_and(std::move(ops))
                                    : Formula::make_or(std::move(ops));
    }
    case Kind::ForAll:
      throw Error("nested quantifier in grounding");
  }
  throw Error("unreachable");
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) {
  return Parser(text).parse();
}

std::string render_formula(const FormulaPtr& f) {
  std::string out;
  render(f, out);
  return out;
}

std::vector<FormulaPtr> ground(const FormulaPtr& f,
                               const std::vector<std::string>& constants) {
  if (f->kind() != Kind::ForAll) return {f};

  std::vector<std::string> uniq;
  std::set<std::string> seen;
  for (const auto& c : constants)
    if (seen.insert(c).second) uniq.push_back(c);
  if (uniq.empty())
    throw Error("cannot ground ForAll(" + f->bound_var() +
                ", ...) over an empty constant set");

  std::vector<FormulaPtr> out;
  out.reserve(uniq.size());
  for (const auto& c : uniq)
    out.push_back(substitute(f->operands()[0], f->bound_var(), c));
  return out;
}

int Vocabulary::add(const Atom& a) {
  auto it = index_.find(a);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(atoms_.size());
  atoms_.push_back(a);
  index_.emplace(a, id);
  for (const auto& c : a.args) {
    if (constant_index_.emplace(c, static_cast<int>(constants_.size())).second)
      constants_.push_back(c);
  }
  return id;
}

void Vocabulary::add_formula(const FormulaPtr& f) {
  std::vector<Atom> atoms;
  collect_atoms(f, atoms);
  for (auto& a : atoms) add(a);
}

int Vocabulary::index_of(const Atom& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

Vocabulary vocabulary_of(std::span<const FormulaPtr> formulas) {
  Vocabulary v;
  for (const auto& f : formulas) v.add_formula(f);
  return v;
}

void collect_atoms(const FormulaPtr& f, std::vector<Atom>& out) {
  switch (f->kind()) {
    case Kind::Atom:
      out.push_back(f->atom());
      return;
    case Kind::ConstTrue:
    case Kind::ConstFalse:
      return;
    default:
      for (const auto& g : f->operands()) collect_atoms(g, out);
  }
}

}  // namespace pacs
