#include <doctest.h>

#include <algorithm>

#include "ilwb/morley.hpp"
#include "oracle.hpp"

using namespace ilwb;

namespace {

Formula eAtom() { return Formula::atom("E", {0, 1}, 2); }

MorleyResult graphMorley() {
  auto [language, theory] = oracle::graphTheory();
  Formula e = eAtom();
  Fragment fragment = fragmentClose(
      {e, Formula::negation(e), Formula::exists(e)}, language);
  return morleyize(language, theory, fragment);
}

} // namespace

TEST_CASE("morleyize structure on the two-formula fragment over the empty theory") {
  auto [language, _] = oracle::graphTheory();
  Theory empty;
  empty.language = language;
  Formula e = eAtom();
  Fragment fragment = fragmentClose({e, Formula::negation(e)}, language);
  MorleyResult result = morleyize(language, empty, fragment);

  // Source relations stay; every fragment member gets a fresh relation.
  CHECK(result.targetLanguage.relations.size() == 1 + fragment.formulas.size());
  CHECK(result.targetLanguage.relations[0].name == "E");
  CHECK(result.formulaIndex.size() == fragment.formulas.size());

  // The atomic biconditional for E(x,y) and the excluded-middle pair for its
  // negation are present in expanded form.
  const RelationSymbol& re = result.relationFor(e);
  const RelationSymbol& rne = result.relationFor(Formula::negation(e));
  CHECK(re.arity == 2);
  CHECK(rne.arity == 2);
  int freshToSource = 0, sourceToFresh = 0, pairLower = 0, pairUpper = 0;
  for (const CoherentAxiom& ax : result.targetTheory.coherentAxioms) {
    if (ax.lhs == result.freshAtom(e) && ax.rhs == e) ++freshToSource;
    if (ax.lhs == e && ax.rhs == result.freshAtom(e)) ++sourceToFresh;
    if (ax.rhs.kind() == FormulaKind::False && ax.lhs.kind() == FormulaKind::And) ++pairLower;
    if (ax.lhs.kind() == FormulaKind::True && ax.rhs.kind() == FormulaKind::Or) ++pairUpper;
  }
  CHECK(freshToSource == 1);
  CHECK(sourceToFresh == 1);
  CHECK(pairLower >= 1);
  CHECK(pairUpper >= 1);

  // Every emitted axiom is coherent on both sides.
  for (const CoherentAxiom& ax : result.targetTheory.coherentAxioms) {
    CHECK(isCoherent(ax.lhs));
    CHECK(isCoherent(ax.rhs));
  }
}

TEST_CASE("morleyized theory is decidable when x != y is in the fragment") {
  auto [language, theory] = oracle::graphTheory();
  Formula neqSeed = Formula::negation(Formula::eq(0, 1, 2));
  Fragment fragment = fragmentClose({neqSeed}, language);
  MorleyResult result = morleyize(language, theory, fragment);
  REQUIRE(result.targetLanguage.decidabilityWitness.has_value());
  Formula witness = *result.targetLanguage.decidabilityWitness;
  CHECK(witness.kind() == FormulaKind::Atom);
  CHECK(witness.relation() == result.relationFor(neqSeed).name);

  // The witness means inequality on every expanded model.
  for (const FiniteModel& m : enumerateModels(language, theory, 3)) {
    FiniteModel expanded = expandModel(m, result);
    TupleSet w = evalFormula(witness, expanded);
    for (int a = 0; a < m.size; ++a)
      for (int b = 0; b < m.size; ++b) CHECK(w.contains({a, b}) == (a != b));
  }
}

TEST_CASE("expandModel pins every fresh relation") {
  MorleyResult result = graphMorley();
  auto [language, theory] = oracle::graphTheory();
  FiniteModel p2 = oracle::pathP2(language);
  FiniteModel expanded = expandModel(p2, result);
  CHECK(satisfiesTheory(expanded, result.targetTheory).allHold());

  const RelationSymbol& rne = result.relationFor(Formula::negation(eAtom()));
  CHECK(expanded.find(rne.name)->tuples.size() == 9 - 4);

  // Conservativity: R_phi evaluates exactly as phi on the source model.
  for (const auto& [phi, rel] : result.formulaIndex) {
    TupleSet viaFresh = evalFormula(result.freshAtom(phi), expanded);
    TupleSet direct = evalFormula(phi, p2);
    CHECK(viaFresh == direct);
  }

  FiniteModel empty = FiniteModel::empty(language, 0);
  FiniteModel expandedEmpty = expandModel(empty, result);
  CHECK(satisfiesTheory(expandedEmpty, result.targetTheory).allHold());
  for (const FiniteModel::Table& t : expandedEmpty.tables)
    if (t.arity > 0) CHECK(t.tuples.empty());

  FiniteModel loop = FiniteModel::empty(language, 1);
  loop.tables[0].tuples = {{0, 0}};
  CHECK_THROWS_AS(expandModel(loop, result), Error);
}

TEST_CASE("expand and reduct are mutually inverse and counts match") {
  MorleyResult result = graphMorley();
  auto [language, theory] = oracle::graphTheory();

  std::vector<FiniteModel> source = enumerateModels(language, theory, 3);
  REQUIRE(source.size() == 12);
  for (const FiniteModel& m : source) {
    FiniteModel expanded = expandModel(m, result);
    CHECK(reductModel(expanded, language) == m);
  }

  std::vector<FiniteModel> target =
      enumerateModels(result.targetLanguage, result.targetTheory, 3);
  CHECK(target.size() == 12);
  for (const FiniteModel& m : target) {
    FiniteModel back = reductModel(m, language);
    CHECK(satisfiesTheory(back, theory).allHold());
    CHECK(expandModel(back, result) == m);
  }
}

TEST_CASE("translateFragmentDisjunction") {
  MorleyResult result = graphMorley();
  auto [language, theory] = oracle::graphTheory();
  Formula e = eAtom();
  Formula ne = Formula::negation(e);

  Formula single = translateFragmentDisjunction({e}, result);
  CHECK(single.kind() == FormulaKind::Or);
  CHECK(single.parts().size() == 1);
  CHECK(single.parts()[0] == result.freshAtom(e));

  Formula pair = translateFragmentDisjunction({e, ne}, result);
  // On every expanded model the pair disjunction covers all pairs.
  for (const FiniteModel& m : enumerateModels(language, theory, 3)) {
    FiniteModel expanded = expandModel(m, result);
    CHECK(evalFormula(pair, expanded) == TupleSet(2, m.size, true));
  }

  CHECK(translateFragmentDisjunction({}, result).kind() == FormulaKind::False);
  Formula outside = Formula::exists(Formula::exists(eAtom()));
  CHECK_THROWS_AS(translateFragmentDisjunction({outside}, result), Error);
}
