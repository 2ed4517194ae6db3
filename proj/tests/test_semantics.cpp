#include <doctest.h>

#include <algorithm>

#include "ilwb/semantics.hpp"
#include "oracle.hpp"

using namespace ilwb;

namespace {

std::vector<std::vector<int>> sorted(std::vector<std::vector<int>> v) {
  std::sort(v.begin(), v.end());
  return v;
}

} // namespace

TEST_CASE("evalFormula matches the stated examples") {
  auto [language, theory] = oracle::graphTheory();
  FiniteModel p2 = oracle::pathP2(language);

  CHECK(evalFormula(Formula::atom("E", {0, 0}, 1), p2).tuples().empty());
  CHECK(evalFormula(Formula::top(0), p2).tuples() == std::vector<std::vector<int>>{{}});
  CHECK(evalFormula(Formula::exists(Formula::atom("E", {0, 1}, 2)), p2).tuples() ==
        std::vector<std::vector<int>>{{0}, {1}, {2}});
}

TEST_CASE("evalFormula agrees with the naive oracle on random formulas") {
  auto [language, theory] = oracle::graphTheory();
  oracle::CoherentGen gen(language, 4242);
  std::vector<FiniteModel> structures;
  for (int size = 0; size <= 3; ++size)
    for (const FiniteModel& m : oracle::allStructures(language, size)) structures.push_back(m);
  for (int i = 0; i < 80; ++i) {
    Formula f = gen.genBoolean(static_cast<int>(gen.rng()() % 3), 4);
    for (const FiniteModel& m : structures) {
      if (!(sorted(evalFormula(f, m).tuples()) == sorted(oracle::naiveEval(f, m)))) {
        CAPTURE(printFormula(f));
        CAPTURE(m.size);
        REQUIRE(false);
      }
    }
  }
}

TEST_CASE("negation evaluates to the complement") {
  auto [language, theory] = oracle::graphTheory();
  oracle::CoherentGen gen(language, 11);
  std::vector<FiniteModel> structures;
  for (int size = 0; size <= 3; ++size)
    for (const FiniteModel& m : oracle::allStructures(language, size)) structures.push_back(m);
  for (int i = 0; i < 40; ++i) {
    Formula f = gen.genBoolean(1 + static_cast<int>(gen.rng()() % 2), 3);
    for (const FiniteModel& m : structures)
      CHECK(evalFormula(Formula::negation(f), m) == evalFormula(f, m).complement());
  }
}

TEST_CASE("satisfiesAxiom verdicts and counterexamples") {
  auto [language, theory] = oracle::graphTheory();
  const CoherentAxiom& symmetry = theory.coherentAxioms[1];

  FiniteModel p2 = oracle::pathP2(language);
  CHECK(satisfiesAxiom(p2, symmetry).holds);

  FiniteModel oneWay = FiniteModel::empty(language, 2);
  oneWay.tables[0].tuples = {{0, 1}};
  AxiomVerdict v = satisfiesAxiom(oneWay, symmetry);
  CHECK_FALSE(v.holds);
  CHECK(*v.counterexample == std::vector<int>{0, 1});

  FiniteModel empty = FiniteModel::empty(language, 0);
  CHECK(satisfiesAxiom(empty, symmetry).holds);
}

TEST_CASE("satisfiesTheory") {
  auto [language, theory] = oracle::graphTheory();
  CHECK(satisfiesTheory(oracle::pathP2(language), theory).allHold());

  FiniteModel loop = oracle::completeK2(language);
  loop.tables[0].tuples.push_back({0, 0});
  loop.normalize();
  TheoryReport report = satisfiesTheory(loop, theory);
  CHECK_FALSE(report.allHold());
  CHECK_FALSE(report.axiomVerdicts[0].holds);  // irreflexivity
  CHECK(report.axiomVerdicts[1].holds);

  Theory empty;
  empty.language = language;
  CHECK(satisfiesTheory(loop, empty).allHold());
}

TEST_CASE("enumerateModels counts and order") {
  auto [graphLang, graphThy] = oracle::graphTheory();
  CHECK(enumerateModels(graphLang, graphThy, 2).size() == 4);
  CHECK(enumerateModels(graphLang, graphThy, 3).size() == 12);

  auto [orderLang, orderThy] = oracle::linearOrderTheory();
  CHECK(enumerateModels(orderLang, orderThy, 3).size() == 10);

  SUBCASE("agrees with the brute-force filter") {
    std::vector<FiniteModel> fast = enumerateModels(graphLang, graphThy, 3);
    std::vector<FiniteModel> slow = oracle::allModels(graphLang, graphThy, 3);
    std::sort(slow.begin(), slow.end());
    std::vector<FiniteModel> fastSorted = fast;
    std::sort(fastSorted.begin(), fastSorted.end());
    CHECK(fastSorted == slow);
  }
  SUBCASE("deterministic, duplicate-free, every model satisfies the theory") {
    std::vector<FiniteModel> a = enumerateModels(graphLang, graphThy, 3);
    std::vector<FiniteModel> b = enumerateModels(graphLang, graphThy, 3);
    CHECK(a == b);
    for (size_t i = 1; i < a.size(); ++i) CHECK_FALSE(a[i] == a[i - 1]);
    for (const FiniteModel& m : a) CHECK(satisfiesTheory(m, graphThy).allHold());
    for (size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].size <= a[i].size);
  }
  SUBCASE("budget produces an explicit error") {
    CHECK_THROWS_AS(enumerateModels(graphLang, graphThy, 3, 5), BudgetExceeded);
  }
}

TEST_CASE("semanticallyEquivalent") {
  auto [orderLang, orderThy] = oracle::linearOrderTheory();
  Formula selfDistinct = inequality(orderLang, 0, 0, 1);
  CHECK(semanticallyEquivalent(selfDistinct, Formula::bottom(1), orderLang, orderThy, 4));

  auto [graphLang, graphThy] = oracle::graphTheory();
  Formula e01 = Formula::atom("E", {0, 1}, 2);
  Formula e10 = Formula::atom("E", {1, 0}, 2);
  CHECK(semanticallyEquivalent(e01, e10, graphLang, graphThy, 4));
  Theory empty;
  empty.language = graphLang;
  CHECK_FALSE(semanticallyEquivalent(e01, e10, graphLang, empty, 2));
}
