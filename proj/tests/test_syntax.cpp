#include <doctest.h>

#include "ilwb/syntax.hpp"
#include "oracle.hpp"

using namespace ilwb;

TEST_CASE("canonical formula construction") {
  Formula a = Formula::atom("E", {0, 1}, 2);
  Formula b = Formula::atom("E", {0, 1}, 2);
  CHECK(a == b);
  CHECK(a.hash() == b.hash());

  // Equality indices are stored sorted, so x=y and y=x coincide.
  CHECK(Formula::eq(1, 0, 2) == Formula::eq(0, 1, 2));

  // Empty connectives collapse.
  CHECK(Formula::conj(3, {}).kind() == FormulaKind::True);
  CHECK(Formula::disj(3, {}).kind() == FormulaKind::False);

  CHECK_THROWS_AS(Formula::atom("E", {0, 2}, 2), Error);
  CHECK_THROWS_AS(Formula::conj(2, {Formula::top(1)}), Error);
}

TEST_CASE("parse and print round-trip on fixtures") {
  auto [language, theory] = oracle::graphTheory();
  CHECK(language.relations.size() == 1);
  CHECK(language.relations[0].name == "E");
  CHECK(language.relations[0].arity == 2);
  CHECK(theory.coherentAxioms.size() == 2);

  std::string printed = printTheory(theory);
  auto [language2, theory2] = parseTheory(printed);
  CHECK(printTheory(theory2) == printed);
  CHECK(language2.relations == language.relations);

  Formula f = parseFormula("exists y. E(x,y)", {"x"}, language);
  CHECK(f.kind() == FormulaKind::Exists);
  CHECK(printFormula(f) == "exists y. E(x,y)");
  CHECK(parseFormula(printFormula(f), {"x"}, language) == f);
}

TEST_CASE("printFormula on basic shapes") {
  Language language;
  language.relations = {{"E", 2}};
  Formula atom = Formula::atom("E", {0, 1}, 2);
  CHECK(printFormula(atom, {"x", "y"}) == "E(x,y)");
  CHECK(printFormula(Formula::exists(atom), {"x"}) == "exists y. E(x,y)");
  CHECK(printFormula(Formula::disj(2, {}), {"x", "y"}) == "false");
}

TEST_CASE("parse errors carry positions and causes") {
  CHECK_THROWS_WITH_AS(parseTheory("language { E/2; }\ntheory { axiom forall x . Q(x) => true; }"),
                       doctest::Contains("unknown relation Q"), ParseError);
  CHECK_THROWS_WITH_AS(parseTheory("language { E/2; }\ntheory { axiom forall x . E(x) => true; }"),
                       doctest::Contains("arity mismatch"), ParseError);
  CHECK_THROWS_WITH_AS(
      parseTheory("language { E/2; }\ntheory { axiom forall x . E(x,z) => true; }"),
      doctest::Contains("unbound variable z"), ParseError);
  Language graph;
  graph.relations = {{"E", 2}};
  CHECK_THROWS_AS(parseFormula("x != y", {"x", "y"}, graph), ParseError);
}

TEST_CASE("parse/print round-trip on random formulas") {
  auto [language, theory] = oracle::graphTheory();
  oracle::CoherentGen gen(language, 20250809);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.genBoolean(static_cast<int>(gen.rng()() % 3), 4);
    std::string text = printFormula(f);
    CAPTURE(text);
    Formula back = parseFormula(text, defaultNames(f.contextSize()), language);
    CHECK(back == f);
  }
}

TEST_CASE("substituteVariables") {
  auto [language, theory] = oracle::graphTheory();
  Formula e = Formula::atom("E", {0, 1}, 2);
  CHECK(substituteVariables(e, {1, 0}, 2) == Formula::atom("E", {1, 0}, 2));
  CHECK(substituteVariables(e, {0, 0}, 1) == Formula::atom("E", {0, 0}, 1));
  CHECK_THROWS_AS(substituteVariables(e, {0, 3}, 2), Error);

  // x0=x1 under {0->2, 1->2} becomes x2=x2, equivalent to true on all
  // 3-element structures.
  Formula eq = substituteVariables(Formula::eq(0, 1, 2), {2, 2}, 3);
  Theory empty;
  empty.language = language;
  CHECK(semanticallyEquivalent(eq, Formula::top(3), language, empty, 3));
}

TEST_CASE("substitution is functorial") {
  auto [language, theory] = oracle::graphTheory();
  oracle::CoherentGen gen(language, 7);
  for (int i = 0; i < 120; ++i) {
    int n = 1 + static_cast<int>(gen.rng()() % 3);
    Formula f = gen.genBoolean(n, 3);
    int mid = 1 + static_cast<int>(gen.rng()() % 3);
    int out = 1 + static_cast<int>(gen.rng()() % 3);
    std::vector<int> first(n), second(mid);
    for (int& v : first) v = static_cast<int>(gen.rng()() % mid);
    for (int& v : second) v = static_cast<int>(gen.rng()() % out);
    std::vector<int> composed;
    for (int v : first) composed.push_back(second[v]);
    CHECK(substituteVariables(substituteVariables(f, first, mid), second, out) ==
          substituteVariables(f, composed, out));
  }
}

TEST_CASE("isCoherent") {
  Formula e = Formula::atom("E", {0, 1}, 2);
  CHECK(isCoherent(Formula::exists(e)));
  CHECK_FALSE(isCoherent(Formula::negation(e)));
  CHECK(isCoherent(Formula::disj(2, {e, Formula::eq(0, 1, 2)})));
  CHECK_FALSE(isCoherent(Formula::forall(e)));
}

TEST_CASE("coherentNormalForm shape and samples") {
  auto [language, theory] = oracle::graphTheory();
  Formula e01 = Formula::atom("E", {0, 1}, 2);
  Formula e10 = Formula::atom("E", {1, 0}, 2);

  Formula nf = coherentNormalForm(e01);
  REQUIRE(nf.kind() == FormulaKind::Or);
  CHECK(nf.parts().size() == 1);

  // or(E(x,y)) /\ E(y,x) -> or(E(x,y) /\ E(y,x))
  Formula combined = Formula::conj(2, {Formula::disj(2, {e01}), e10});
  Formula nf2 = coherentNormalForm(combined);
  CHECK(semanticallyEquivalent(combined, nf2, language, theory, 3));

  // exists y. (E(x,y) /\ or(E(y,x); y=x)) -> two existential disjuncts
  Formula body = Formula::conj(2, {e01, Formula::disj(2, {e10, Formula::eq(0, 1, 2)})});
  Formula nested = Formula::exists(body);
  Formula nf3 = coherentNormalForm(nested);
  REQUIRE(nf3.kind() == FormulaKind::Or);
  CHECK(nf3.parts().size() == 2);
  CHECK(semanticallyEquivalent(nested, nf3, language, theory, 3));

  CHECK_THROWS_AS(coherentNormalForm(Formula::negation(e01)), Error);
}

namespace {

// Structural check for the normal-form shape: a disjunction of
// existentially-quantified conjunctions of atomic or equality literals.
bool literalOnly(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::And:
      for (const Formula& p : f.parts())
        if (p.kind() != FormulaKind::Atom && p.kind() != FormulaKind::Eq) return false;
      return true;
    default:
      return false;
  }
}

bool normalFormShape(const Formula& f) {
  if (f.kind() == FormulaKind::False) return true;  // empty disjunction
  if (f.kind() != FormulaKind::Or) return false;
  for (const Formula& d : f.parts()) {
    Formula inner = d;
    while (inner.kind() == FormulaKind::Exists) inner = inner.child();
    if (!literalOnly(inner)) return false;
  }
  return true;
}

} // namespace

TEST_CASE("coherentNormalForm preserves evaluation on random formulas") {
  auto [language, theory] = oracle::graphTheory();
  oracle::CoherentGen gen(language, 99);
  std::vector<FiniteModel> models;
  for (int size = 0; size <= 3; ++size)
    for (const FiniteModel& m : oracle::allStructures(language, size)) models.push_back(m);
  for (int i = 0; i < 60; ++i) {
    Formula f = gen.gen(static_cast<int>(gen.rng()() % 3), 3);
    Formula nf = coherentNormalForm(f);
    CHECK(normalFormShape(nf));
    for (const FiniteModel& m : models) {
      if (!(evalFormula(f, m) == evalFormula(nf, m))) {
        CAPTURE(printFormula(f));
        CAPTURE(printFormula(nf));
        CHECK(false);
        return;
      }
    }
  }
}

TEST_CASE("fragmentClose") {
  auto [language, theory] = oracle::graphTheory();
  Formula e = Formula::atom("E", {0, 1}, 2);
  Formula existsE = Formula::exists(Formula::atom("E", {0, 1}, 2));

  SUBCASE("seed {exists y. E(x,y)}") {
    Fragment f = fragmentClose({existsE}, language);
    CHECK(f.maxContext == 2);
    CHECK(f.contains(existsE));
    CHECK(f.contains(e));
    CHECK(f.contains(Formula::atom("E", {0, 0}, 1)));
    CHECK(f.contains(Formula::eq(0, 1, 2)));
    CHECK(f.contains(Formula::eq(0, 0, 1)));
    CHECK(f.contains(Formula::top(1)));
    CHECK(f.contains(Formula::top(2)));
  }
  SUBCASE("empty seed has only the empty-context atomics") {
    Fragment f = fragmentClose({}, language);
    CHECK(f.maxContext == 0);
    CHECK(f.formulas.size() == 1);
    CHECK(f.contains(Formula::top(0)));
  }
  SUBCASE("negation seeds keep their subformulas") {
    Fragment f = fragmentClose({Formula::negation(e)}, language);
    CHECK(f.contains(e));
  }
  SUBCASE("forall members get their not-exists-not partner") {
    Formula inner = Formula::atom("E", {0, 1}, 2);
    Formula all = Formula::forall(inner);
    Fragment f = fragmentClose({all}, language);
    Formula partner = Formula::negation(Formula::exists(Formula::negation(inner)));
    CHECK(f.contains(partner));
  }
  SUBCASE("conjunction members get their negations") {
    Formula both = Formula::conj(2, {e, Formula::eq(0, 1, 2)});
    Fragment f = fragmentClose({both}, language);
    CHECK(f.contains(Formula::negation(e)));
    CHECK(f.contains(Formula::negation(Formula::eq(0, 1, 2))));
  }
}

TEST_CASE("inequality expands the decidability witness") {
  auto [language, theory] = oracle::linearOrderTheory();
  Formula neq = inequality(language, 0, 1, 2);
  CHECK(neq.kind() == FormulaKind::Or);
  Language graph;
  graph.relations = {{"E", 2}};
  CHECK_THROWS_AS(inequality(graph, 0, 1, 2), Error);
}
