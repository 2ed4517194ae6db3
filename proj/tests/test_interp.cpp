#include <doctest.h>

#include <algorithm>

#include "ilwb/interp.hpp"
#include "oracle.hpp"

using namespace ilwb;

namespace {

// Graphs interpreted in linear orders: comparability is the edge relation,
// so every order transports to the complete graph.
Interpretation completeGraphInterpretation(LogicMode mode = LogicMode::Coherent) {
  auto [graphLang, graphThy] = oracle::graphTheory();
  auto [orderLang, orderThy] = oracle::linearOrderTheory();
  Interpretation interp;
  interp.sourceLanguage = graphLang;
  interp.sourceTheory = graphThy;
  interp.targetLanguage = orderLang;
  interp.targetTheory = orderThy;
  interp.homSortImage = homeSort();
  interp.mode = mode;
  DefinableRelation edge;
  edge.sort = powerSort(interp.homSortImage, 2);
  edge.pieces = {Formula::disj(2, {Formula::atom("Lt", {0, 1}, 2), Formula::atom("Lt", {1, 0}, 2)})};
  interp.relationImages = {edge};
  return interp;
}

// Graphs in graphs by complementing the edge relation (Boolean mode).
Interpretation complementInterpretation() {
  auto [graphLang, graphThy] = oracle::graphTheory();
  Interpretation interp;
  interp.sourceLanguage = graphLang;
  interp.sourceTheory = graphThy;
  interp.targetLanguage = graphLang;
  interp.targetTheory = graphThy;
  interp.homSortImage = homeSort();
  interp.mode = LogicMode::Boolean;
  DefinableRelation edge;
  edge.sort = powerSort(interp.homSortImage, 2);
  edge.pieces = {Formula::conj(2, {Formula::negation(Formula::atom("E", {0, 1}, 2)),
                                   Formula::negation(Formula::eq(0, 1, 2))})};
  interp.relationImages = {edge};
  return interp;
}

FiniteModel chainModel(const Language& orderLang, int size) {
  FiniteModel m = FiniteModel::empty(orderLang, size);
  for (int a = 0; a < size; ++a)
    for (int b = a + 1; b < size; ++b) m.tables[0].tuples.push_back({a, b});
  m.normalize();
  return m;
}

} // namespace

TEST_CASE("translateFormulaAlong basics") {
  Interpretation cg = completeGraphInterpretation();
  auto [orderLang, orderThy] = oracle::linearOrderTheory();

  SUBCASE("true translates to the full subsort") {
    DefinableRelation full = translateFormulaAlong(cg, Formula::top(2));
    CHECK(full.pieces.size() == 1);
    CHECK(semanticallyEquivalent(full.pieces[0], Formula::top(2), orderLang, orderThy, 3));
  }
  SUBCASE("equality translates to the diagonal") {
    DefinableRelation diag = translateFormulaAlong(cg, Formula::eq(0, 1, 2));
    CHECK(semanticallyEquivalent(diag.pieces[0], Formula::eq(0, 1, 2), orderLang, orderThy, 3));
  }
  SUBCASE("the edge atom evaluates to all off-diagonal pairs on the 3-chain") {
    DefinableRelation edge = translateFormulaAlong(cg, Formula::atom("E", {0, 1}, 2));
    FiniteModel chain = chainModel(orderLang, 3);
    TupleSet s = evalFormula(edge.pieces[0], chain);
    CHECK(s.count() == 6);
    for (int a = 0; a < 3; ++a) CHECK_FALSE(s.contains({a, a}));
  }
  SUBCASE("coherent mode rejects negation") {
    CHECK_THROWS_AS(
        translateFormulaAlong(cg, Formula::negation(Formula::atom("E", {0, 1}, 2))), Error);
  }
}

TEST_CASE("validateInterpretation") {
  SUBCASE("the complete-graph interpretation validates at cap 4") {
    InterpretationReport report = validateInterpretation(completeGraphInterpretation(), 4);
    CHECK(report.valid);
  }
  SUBCASE("dropping symmetry of the image fails with a witness") {
    Interpretation bad = completeGraphInterpretation();
    bad.relationImages[0].pieces = {Formula::atom("Lt", {0, 1}, 2)};
    InterpretationReport report = validateInterpretation(bad, 3);
    CHECK_FALSE(report.valid);
    bool sawAxiomFailure = false;
    for (const InterpretationCheck& c : report.checks)
      if (!c.holds && c.modelIndex >= 0) {
        sawAxiomFailure = true;
        CHECK(c.witness.size() == 2);
      }
    CHECK(sawAxiomFailure);
  }
  SUBCASE("the identity interpretation validates") {
    auto [graphLang, graphThy] = oracle::graphTheory();
    CHECK(validateInterpretation(identityInterpretation(graphLang, graphThy), 3).valid);
  }
  SUBCASE("the complement interpretation validates in Boolean mode") {
    CHECK(validateInterpretation(complementInterpretation(), 3).valid);
  }
}

TEST_CASE("applyToModel") {
  Interpretation cg = completeGraphInterpretation();
  auto [orderLang, orderThy] = oracle::linearOrderTheory();
  auto [graphLang, graphThy] = oracle::graphTheory();

  SUBCASE("the 3-chain maps to K3") {
    FiniteModel k3 = applyToModel(cg, chainModel(orderLang, 3));
    CHECK(k3.size == 3);
    CHECK(k3.tables[0].tuples.size() == 6);
    CHECK(satisfiesTheory(k3, graphThy).allHold());
  }
  SUBCASE("every order of size <= 4 maps to a model of the graph theory") {
    for (const FiniteModel& m : enumerateModels(orderLang, orderThy, 4)) {
      FiniteModel g = applyToModel(cg, m);
      CHECK(g.size == m.size);
      CHECK(satisfiesTheory(g, graphThy).allHold());
    }
  }
  SUBCASE("identity transport is the identity on the nose") {
    Interpretation id = identityInterpretation(graphLang, graphThy);
    for (const FiniteModel& m : enumerateModels(graphLang, graphThy, 3))
      CHECK(applyToModel(id, m) == m);
  }
  SUBCASE("the empty model maps to the empty model") {
    CHECK(applyToModel(cg, FiniteModel::empty(orderLang, 0)).size == 0);
  }
  SUBCASE("non-models are rejected") {
    FiniteModel bad = FiniteModel::empty(orderLang, 1);
    bad.tables[0].tuples = {{0, 0}};
    CHECK_THROWS_AS(applyToModel(cg, bad), Error);
  }
}

TEST_CASE("applyToIso is strictly functorial") {
  Interpretation coInterp = complementInterpretation();
  auto [graphLang, graphThy] = oracle::graphTheory();
  GroupoidSlice slice = buildGroupoidSlice(graphLang, graphThy, 2);

  // Identities map to identities.
  for (size_t m = 0; m < slice.models.size(); ++m) {
    std::vector<int> id(slice.models[m].size);
    std::iota(id.begin(), id.end(), 0);
    CHECK(applyToIso(coInterp, slice.models[m], slice.models[m], id) == id);
  }

  // Composites map to composites, and transported permutations are
  // isomorphisms of the transported models.
  for (const Isomorphism& g : slice.morphisms)
    for (const Isomorphism& h : slice.morphisms) {
      if (h.sourceIndex != g.targetIndex) continue;
      std::vector<int> hg(g.permutation.size());
      for (size_t i = 0; i < hg.size(); ++i) hg[i] = h.permutation[g.permutation[i]];
      std::vector<int> viaComposite = applyToIso(coInterp, slice.models[g.sourceIndex],
                                                 slice.models[h.targetIndex], hg);
      std::vector<int> gT = applyToIso(coInterp, slice.models[g.sourceIndex],
                                       slice.models[g.targetIndex], g.permutation);
      std::vector<int> hT = applyToIso(coInterp, slice.models[h.sourceIndex],
                                       slice.models[h.targetIndex], h.permutation);
      std::vector<int> stepwise(gT.size());
      for (size_t i = 0; i < gT.size(); ++i) stepwise[i] = hT[gT[i]];
      CHECK(viaComposite == stepwise);
    }

  // Rigid sources transport to single identities.
  auto [orderLang, orderThy] = oracle::linearOrderTheory();
  Interpretation cg = completeGraphInterpretation();
  for (const FiniteModel& m : enumerateModels(orderLang, orderThy, 3)) {
    std::vector<Isomorphism> autos = enumerateIsomorphisms(m, m);
    REQUIRE(autos.size() == 1);
    std::vector<int> id(m.size);
    std::iota(id.begin(), id.end(), 0);
    CHECK(applyToIso(cg, m, m, autos[0].permutation) == id);
  }
}

TEST_CASE("composeInterpretations with natural zeta components") {
  auto [graphLang, graphThy] = oracle::graphTheory();
  auto [orderLang, orderThy] = oracle::linearOrderTheory();

  SUBCASE("composition with the identity has identity zeta components") {
    Interpretation id = identityInterpretation(graphLang, graphThy);
    Interpretation coInterp = complementInterpretation();
    ComposedInterpretation c1 = composeInterpretations(coInterp, id, 2);
    for (const CodedMap& z : c1.zeta) CHECK(z == CodedMap::identity(z.sourceSize));
    ComposedInterpretation c2 = composeInterpretations(id, coInterp, 2);
    for (const CodedMap& z : c2.zeta) CHECK(z == CodedMap::identity(z.sourceSize));
  }

  SUBCASE("complete-graph after complement lands every order on the edgeless graph") {
    Interpretation cg = completeGraphInterpretation(LogicMode::Boolean);
    Interpretation coInterp = complementInterpretation();
    ComposedInterpretation composed = composeInterpretations(cg, coInterp, 3);
    CHECK(composed.interpretation.sourceLanguage.relations[0].name == "E");
    CHECK(composed.interpretation.targetLanguage.relations[0].name == "Lt");

    for (size_t m = 0; m < composed.targetModels.size(); ++m) {
      FiniteModel image = applyToModel(composed.interpretation, composed.targetModels[m]);
      CHECK(image.size == composed.targetModels[m].size);
      CHECK(image.tables[0].tuples.empty());
      CHECK(satisfiesTheory(image, graphThy).allHold());
    }

    // Naturality of zeta in the model: for every slice morphism the square
    // with the transported isomorphisms commutes.
    GroupoidSlice slice = buildGroupoidSlice(orderLang, orderThy, 3);
    REQUIRE(slice.models.size() == composed.targetModels.size());
    for (const Isomorphism& g : slice.morphisms) {
      const FiniteModel& m1 = slice.models[g.sourceIndex];
      const FiniteModel& m2 = slice.models[g.targetIndex];
      std::vector<int> viaComposite =
          applyToIso(composed.interpretation, m1, m2, g.permutation);
      std::vector<int> gMid = applyToIso(cg, m1, m2, g.permutation);
      FiniteModel mid1 = applyToModel(cg, m1);
      FiniteModel mid2 = applyToModel(cg, m2);
      std::vector<int> viaSteps = applyToIso(coInterp, mid1, mid2, gMid);
      const CodedMap& z1 = composed.zeta[g.sourceIndex];
      const CodedMap& z2 = composed.zeta[g.targetIndex];
      for (int c = 0; c < z1.sourceSize; ++c)
        CHECK(z2.values[viaComposite[c]] == viaSteps[z1.values[c]]);
    }
  }
}

TEST_CASE("sequenceSortEmbedding") {
  auto [graphLang, graphThy] = oracle::graphTheory();

  SUBCASE("home sort embeds at arity 1 with equality") {
    SequenceSortEmbedding emb = sequenceSortEmbedding(homeSort());
    CHECK(emb.paddedArities == std::vector<int>{1});
    for (const FiniteModel& m : enumerateModels(graphLang, graphThy, 3)) {
      CodedMap bij = sequenceEmbeddingBijection(homeSort(), emb, m);
      CHECK(bij.isBijection());
      CHECK(bij.sourceSize == m.size);
    }
  }
  SUBCASE("two arity-2 pieces pad to arities 2 and 3") {
    ImaginarySort twoPieces =
        sortFromFormulas({Formula::atom("E", {0, 1}, 2), Formula::top(2)});
    SequenceSortEmbedding emb = sequenceSortEmbedding(twoPieces);
    CHECK(emb.paddedArities == std::vector<int>{2, 3});
    for (const FiniteModel& m : enumerateModels(graphLang, graphThy, 3)) {
      CodedMap bij = sequenceEmbeddingBijection(twoPieces, emb, m);
      CHECK(bij.isBijection());
    }
  }
  SUBCASE("empty sort embeds with empty fibers") {
    ImaginarySort empty = sortFromFormula(Formula::bottom(1));
    SequenceSortEmbedding emb = sequenceSortEmbedding(empty);
    FiniteModel m = oracle::pathP2(graphLang);
    CodedMap bij = sequenceEmbeddingBijection(empty, emb, m);
    CHECK(bij.sourceSize == 0);
  }
  SUBCASE("an arity-0 piece that must be padded is reported") {
    ImaginarySort bad = sortFromFormulas({Formula::top(0), Formula::top(0)});
    CHECK_THROWS_WITH_AS(sequenceSortEmbedding(bad), doctest::Contains("arity-0"), Error);
  }
}

TEST_CASE("fromHMMData") {
  auto [graphLang, graphThy] = oracle::graphTheory();
  auto [orderLang, orderThy] = oracle::linearOrderTheory();

  Formula top1 = Formula::top(1);
  Formula eqRel = Formula::conj(2, {Formula::eq(0, 1, 2)});

  SUBCASE("identity data reproduces the identity interpretation") {
    HMMData data;
    data.domainPieces = {top1};
    data.domainEquivalence = {{eqRel}};
    data.relationImages = {{{Formula::atom("E", {0, 1}, 2)}}};
    Interpretation interp = fromHMMData(data, graphLang, graphThy, graphLang, graphThy, 3);
    for (const FiniteModel& m : enumerateModels(graphLang, graphThy, 3))
      CHECK(applyToModel(interp, m) == m);
  }
  SUBCASE("the complete-graph interpretation re-entered in HMM form agrees") {
    HMMData data;
    data.domainPieces = {top1};
    data.domainEquivalence = {{eqRel}};
    data.relationImages = {{{Formula::disj(
        2, {Formula::atom("Lt", {0, 1}, 2), Formula::atom("Lt", {1, 0}, 2)})}}};
    Interpretation viaHMM = fromHMMData(data, graphLang, graphThy, orderLang, orderThy, 4);
    Interpretation direct = completeGraphInterpretation();
    for (const FiniteModel& m : enumerateModels(orderLang, orderThy, 4))
      CHECK(applyToModel(viaHMM, m) == applyToModel(direct, m));
  }
  SUBCASE("relation images must respect the equivalence") {
    // Identify all points, then try to interpret the edge by the order: the
    // image is not invariant under the total equivalence.
    HMMData data;
    data.domainPieces = {top1};
    data.domainEquivalence = {{Formula::top(2)}};
    data.relationImages = {{{Formula::atom("Lt", {0, 1}, 2)}}};
    CHECK_THROWS_WITH_AS(fromHMMData(data, graphLang, graphThy, orderLang, orderThy, 3),
                         doctest::Contains("not invariant"), Error);
  }
}

TEST_CASE("searchInterpretation finds the identity and reports exhaustion") {
  auto [graphLang, graphThy] = oracle::graphTheory();
  GroupoidSlice slice = buildGroupoidSlice(graphLang, graphThy, 2);

  SUBCASE("the identity functor table is matched") {
    FunctorTable table;
    for (const FiniteModel& m : slice.models) table.objectImages.push_back(m);
    for (const Isomorphism& iso : slice.morphisms)
      table.morphismImages.push_back(iso.permutation);
    SearchResult result = searchInterpretation(table, graphLang, graphThy, slice, {});
    CHECK(result.found);
    REQUIRE(result.interpretation.has_value());
    for (size_t m = 0; m < slice.models.size(); ++m)
      CHECK(applyToModel(*result.interpretation, slice.models[m]) == table.objectImages[m]);
  }
  SUBCASE("a non-functorial table exhausts the search") {
    FunctorTable table;
    for (const FiniteModel& m : slice.models) table.objectImages.push_back(m);
    // Images of morphisms scrambled: identities sent to the swap where one
    // exists, which no functor does.
    for (const Isomorphism& iso : slice.morphisms) {
      std::vector<int> p = iso.permutation;
      if (p.size() == 2 && iso.sourceIndex == iso.targetIndex) p = {1, 0};
      table.morphismImages.push_back(p);
    }
    SearchResult result = searchInterpretation(table, graphLang, graphThy, slice, {});
    CHECK_FALSE(result.found);
    CHECK(result.candidatesTried > 0);
  }
}
