#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "pacs/errors.hpp"
#include "pacs/logic.hpp"

using namespace pacs;

TEST_CASE("parse basic forms") {
  CHECK(parse_formula("True")->kind() == Kind::ConstTrue);
  CHECK(parse_formula("False")->kind() == Kind::ConstFalse);

  auto f = parse_formula("Implies(walk_out_alone(her), independent(her))");
  REQUIRE(f->kind() == Kind::Implies);
  CHECK(f->operands()[0]->atom().predicate == "walk_out_alone");
  CHECK(f->operands()[0]->atom().args == std::vector<std::string>{"her"});

  auto g = parse_formula("And(a, Not(a))");
  REQUIRE(g->kind() == Kind::And);
  CHECK(g->operands()[0]->kind() == Kind::Atom);
  CHECK(g->operands()[1]->kind() == Kind::Not);

  auto h = parse_formula("rainy");
  CHECK(h->atom().predicate == "rainy");
  CHECK(h->atom().args.empty());

  auto multi = parse_formula("likes(alice, bob)");
  CHECK(multi->atom().args == std::vector<std::string>{"alice", "bob"});
}

TEST_CASE("parse is whitespace-insensitive") {
  auto a = parse_formula("Implies(a,b)");
  auto b = parse_formula("  Implies ( a , b )  ");
  CHECK(equal(a, b));
}

TEST_CASE("parse rejects malformed input with positions") {
  CHECK_THROWS_AS(parse_formula(""), ParseError);
  CHECK_THROWS_AS(parse_formula("And()"), ParseError);
  CHECK_THROWS_AS(parse_formula("Implies(a)"), ParseError);
  CHECK_THROWS_AS(parse_formula("Implies(a, b, c)"), ParseError);
  CHECK_THROWS_AS(parse_formula("Not(a) junk"), ParseError);
  CHECK_THROWS_AS(parse_formula("3bad"), ParseError);
  CHECK_THROWS_AS(parse_formula("And(a,)"), ParseError);

  try {
    parse_formula("And(a, ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 7);
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("quantifiers only at top level") {
  auto f = parse_formula("ForAll(x, Implies(p(x), q(x)))");
  REQUIRE(f->kind() == Kind::ForAll);
  CHECK(f->bound_var() == "x");
  CHECK_THROWS_AS(parse_formula("And(ForAll(x, p(x)), q)"), ParseError);
  CHECK_THROWS_AS(parse_formula("Not(ForAll(x, p(x)))"), ParseError);
}

TEST_CASE("bound variable usage") {
  // The bound variable may appear as any argument; unrelated constants stay.
  auto f = parse_formula("ForAll(x, Implies(knows(x, alice), likes(alice, x)))");
  auto gs = ground(f, {"bob"});
  REQUIRE(gs.size() == 1);
  CHECK(render_formula(gs[0]) == "Implies(knows(bob, alice), likes(alice, bob))");
}

TEST_CASE("render canonical forms") {
  CHECK(render_formula(parse_formula("Implies(a,b)")) == "Implies(a, b)");
  CHECK(render_formula(parse_formula("ForAll(x,Implies(p(x),q(x)))")) ==
        "ForAll(x, Implies(p(x), q(x)))");
  CHECK(render_formula(parse_formula("And(a,Or(b,c),Not(d))")) ==
        "And(a, Or(b, c), Not(d))");
  CHECK(render_formula(parse_formula("True")) == "True");
  CHECK(render_formula(parse_formula("p()")) == "p");
}

TEST_CASE("grounding") {
  auto f = parse_formula("ForAll(x, p(x))");
  auto gs = ground(f, {"a", "b"});
  REQUIRE(gs.size() == 2);
  CHECK(render_formula(gs[0]) == "p(a)");
  CHECK(render_formula(gs[1]) == "p(b)");

  auto plain = parse_formula("Implies(p(a), q(a))");
  auto same = ground(plain, {"a", "b", "z"});
  REQUIRE(same.size() == 1);
  CHECK(equal(same[0], plain));

  auto folio = parse_formula("ForAll(x, Iff(prof(x), teach(x)))");
  auto one = ground(folio, {"m"});
  REQUIRE(one.size() == 1);
  CHECK(render_formula(one[0]) == "Iff(prof(m), teach(m))");

  CHECK_THROWS_AS(ground(f, {}), Error);

  auto dup = ground(f, {"a", "a", "b"});
  CHECK(dup.size() == 2);
}

TEST_CASE("vocabulary ordering is first appearance") {
  std::vector<FormulaPtr> fs = {parse_formula("Implies(b, a)"),
                                parse_formula("And(a, c)")};
  Vocabulary v = vocabulary_of(fs);
  REQUIRE(v.size() == 3);
  CHECK(v.atoms()[0].predicate == "b");
  CHECK(v.atoms()[1].predicate == "a");
  CHECK(v.atoms()[2].predicate == "c");
  CHECK(v.index_of({"c", {}}) == 2);
  CHECK(v.index_of({"zzz", {}}) == -1);
}

TEST_CASE("vocabulary collects constants") {
  std::vector<FormulaPtr> fs = {parse_formula("likes(alice, bob)"),
                                parse_formula("tall(carol)")};
  Vocabulary v = vocabulary_of(fs);
  CHECK(v.constants() == std::vector<std::string>{"alice", "bob", "carol"});
}

TEST_CASE("round trip on random formulas") {
  std::mt19937_64 rng(20260816);
  auto atoms = oracle::atom_pool(6);
  for (int iter = 0; iter < 1000; ++iter) {
    FormulaPtr f = oracle::random_formula(rng, atoms, 4);
    FormulaPtr back = parse_formula(render_formula(f));
    CHECK(equal(f, back));
    // One round trip is a fixed point.
    CHECK(render_formula(back) == render_formula(f));
  }
}

TEST_CASE("grounding matches finite-domain semantics by enumeration") {
  // ForAll(x, body) over constants C is true under an assignment iff every
  // instantiation is; check the expansion agrees on all assignments.
  auto f = parse_formula("ForAll(x, Implies(p(x), q(x)))");
  std::vector<std::string> consts = {"a", "b", "c"};
  auto gs = ground(f, consts);
  REQUIRE(gs.size() == 3);
  Vocabulary vocab = vocabulary_of(gs);
  REQUIRE(vocab.size() == 6);
  for (std::uint64_t bits = 0; bits < 64; ++bits) {
    std::vector<bool> assign(6);
    for (int i = 0; i < 6; ++i) assign[i] = (bits >> i) & 1;
    bool every = true;
    for (const auto& g : gs) every = every && oracle::eval(g, vocab, assign);
    bool conj = oracle::eval_state(gs, vocab, assign);
    CHECK(every == conj);
  }
}
