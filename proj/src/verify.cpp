#include "ilwb/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "ilwb/definability.hpp"
#include "ilwb/errors.hpp"
#include "ilwb/interp.hpp"
#include "ilwb/morley.hpp"
#include "ilwb/parallel.hpp"

namespace ilwb {

int VerifyReport::passCount() const {
  int n = 0;
  for (const VerifyCheck& c : checks) n += c.pass;
  return n;
}

int VerifyReport::failCount() const {
  int n = 0;
  for (const VerifyCheck& c : checks) n += !c.pass;
  return n;
}

namespace {

struct Corpus {
  Language graphLang;
  Theory graphThy;
  Language orderLang;
  Theory orderThy;
};

Corpus builtinCorpus() {
  Corpus c;
  std::tie(c.graphLang, c.graphThy) = parseTheory(
      "language { E/2; }\n"
      "theory {\n"
      "  axiom forall x . E(x,x) => false;\n"
      "  axiom forall x y . E(x,y) => E(y,x);\n"
      "}\n");
  std::tie(c.orderLang, c.orderThy) = parseTheory(
      "language { Lt/2; }\n"
      "decidable via or(Lt(x,y), Lt(y,x));\n"
      "theory {\n"
      "  axiom forall x . Lt(x,x) => false;\n"
      "  axiom forall x y z . and(Lt(x,y), Lt(y,z)) => Lt(x,z);\n"
      "  axiom forall x y . true => or(Lt(x,y), Lt(y,x), x = y);\n"
      "}\n");
  return c;
}

class SuiteRunner {
public:
  SuiteRunner(const RunConfig& config, VerifyReport& report)
      : config_(config), report_(report), rng_(config.seed) {}

  void check(const std::string& name, bool pass, const std::string& detail = "") {
    report_.checks.push_back({name, pass, detail});
  }

  template <typename F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      check(name, false, std::string("error: ") + e.what());
    }
  }

  std::mt19937_64& rng() { return rng_; }
  const RunConfig& config() const { return config_; }

private:
  const RunConfig& config_;
  VerifyReport& report_;
  std::mt19937_64 rng_;
};

// Seeded coherent formula source shared by the suites.
Formula randomCoherent(std::mt19937_64& rng, const Language& language, int context, int depth) {
  int pick = depth <= 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 6);
  switch (pick) {
    case 0: {
      std::vector<const RelationSymbol*> usable;
      for (const RelationSymbol& r : language.relations)
        if (r.arity == 0 || context > 0) usable.push_back(&r);
      if (usable.empty()) return Formula::top(context);
      const RelationSymbol& r = *usable[rng() % usable.size()];
      std::vector<int> args;
      for (int i = 0; i < r.arity; ++i) args.push_back(static_cast<int>(rng() % context));
      return Formula::atom(r.name, args, context);
    }
    case 1:
      if (context == 0) return Formula::top(context);
      return Formula::eq(static_cast<int>(rng() % context), static_cast<int>(rng() % context),
                         context);
    case 2:
      return rng() % 2 ? Formula::top(context) : Formula::bottom(context);
    case 3:
    case 4: {
      int count = 1 + static_cast<int>(rng() % 3);
      std::vector<Formula> parts;
      for (int i = 0; i < count; ++i) parts.push_back(randomCoherent(rng, language, context, depth - 1));
      return pick == 3 ? Formula::conj(context, parts) : Formula::disj(context, parts);
    }
    default:
      return Formula::exists(randomCoherent(rng, language, context + 1, depth - 1));
  }
}

void runMorleySuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = run.config().universeCap;
  run.guarded("morley", [&] {
    Formula e = Formula::atom("E", {0, 1}, 2);
    Fragment fragment = fragmentClose(
        {e, Formula::negation(e), Formula::exists(e), Formula::negation(Formula::eq(0, 1, 2))},
        corpus.graphLang);
    MorleyResult result = morleyize(corpus.graphLang, corpus.graphThy, fragment);

    bool coherent = true;
    for (const CoherentAxiom& ax : result.targetTheory.coherentAxioms)
      coherent = coherent && isCoherent(ax.lhs) && isCoherent(ax.rhs);
    run.check("morley: emitted axioms are coherent", coherent);
    run.check("morley: target language is decidable",
              result.targetLanguage.decidabilityWitness.has_value());

    std::vector<FiniteModel> source =
        enumerateModels(corpus.graphLang, corpus.graphThy, cap, run.config().budget);
    std::vector<FiniteModel> target =
        enumerateModels(result.targetLanguage, result.targetTheory, cap, run.config().budget);
    run.check("morley: model counts agree at cap",
              source.size() == target.size(),
              std::to_string(source.size()) + " vs " + std::to_string(target.size()));

    bool inverse = true;
    for (const FiniteModel& m : source)
      inverse = inverse && reductModel(expandModel(m, result), corpus.graphLang) == m;
    for (const FiniteModel& m : target)
      inverse = inverse && expandModel(reductModel(m, corpus.graphLang), result) == m;
    run.check("morley: expand and reduct are mutually inverse", inverse);

    bool conservative = true;
    for (const FiniteModel& m : source) {
      FiniteModel expanded = expandModel(m, result);
      for (const auto& [phi, rel] : result.formulaIndex)
        conservative =
            conservative && evalFormula(result.freshAtom(phi), expanded) == evalFormula(phi, m);
    }
    run.check("morley: fresh relations evaluate conservatively", conservative);
  });
}

void runPretoposSuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = std::min(run.config().universeCap, 3);
  run.guarded("pretopos", [&] {
    std::vector<FiniteModel> models =
        enumerateModels(corpus.graphLang, corpus.graphThy, cap, run.config().budget);

    bool unitLaws = true, assoc = true, products = true, equalizers = true, boolean = true;
    for (int trial = 0; trial < 20; ++trial) {
      Formula alpha = randomCoherent(run.rng(), corpus.graphLang,
                                     1 + static_cast<int>(run.rng()() % 2), 2);
      ImaginarySort a = sortFromFormula(alpha);
      DefinableFunction id = identityFunction(a);
      DefinableFunction twice = composeFunctions(id, id);
      DefinableFunction left = composeFunctions(twice, id);
      DefinableFunction right = composeFunctions(id, twice);
      for (const FiniteModel& m : models) {
        CodedMap base = interpretFunctionInModel(id, m);
        unitLaws = unitLaws && interpretFunctionInModel(twice, m) == base;
        assoc = assoc &&
                interpretFunctionInModel(left, m) == interpretFunctionInModel(right, m);
      }

      Formula beta = randomCoherent(run.rng(), corpus.graphLang, 1, 2);
      ImaginarySort b = sortFromFormula(beta);
      ProductSort prod = productSort(a, b);
      for (const FiniteModel& m : models) {
        InterpretedSort fa = interpretSortInModel(a, m);
        InterpretedSort fb = interpretSortInModel(b, m);
        InterpretedSort fab = interpretSortInModel(prod.sort, m);
        products = products && fab.carrier.size == fa.carrier.size * fb.carrier.size;
        CodedMap l = interpretFunctionInModel(prod.left, fab, fa);
        CodedMap r = interpretFunctionInModel(prod.right, fab, fb);
        std::set<std::pair<int, int>> pairs;
        for (int i = 0; i < fab.carrier.size; ++i) pairs.insert({l.values[i], r.values[i]});
        products = products && static_cast<int>(pairs.size()) == fab.carrier.size;
      }

      DefinableRelation eq = equalizerSort(id, id);
      for (const FiniteModel& m : models) {
        InterpretedSort whole = interpretSortInModel(a, m);
        InterpretedSort sub = interpretSortInModel(relationAsSort(eq), m);
        equalizers = equalizers && whole.carrier.size == sub.carrier.size;
      }

      Formula x = randomCoherent(run.rng(), corpus.graphLang, 2, 2);
      Formula y = randomCoherent(run.rng(), corpus.graphLang, 2, 2);
      Formula doubleNeg = subobjectOp(
          SubobjectOp::Complement,
          {subobjectOp(SubobjectOp::Complement, {x}, LogicMode::Boolean)}, LogicMode::Boolean);
      Formula lhs = subobjectOp(SubobjectOp::Meet, {x, y});
      Formula viaDeMorgan = subobjectOp(
          SubobjectOp::Complement,
          {subobjectOp(SubobjectOp::Join,
                       {subobjectOp(SubobjectOp::Complement, {x}, LogicMode::Boolean),
                        subobjectOp(SubobjectOp::Complement, {y}, LogicMode::Boolean)})},
          LogicMode::Boolean);
      for (const FiniteModel& m : models) {
        boolean = boolean && evalFormula(doubleNeg, m) == evalFormula(x, m);
        boolean = boolean && evalFormula(lhs, m) == evalFormula(viaDeMorgan, m);
      }
    }
    run.check("pretopos: composition is unital pointwise", unitLaws);
    run.check("pretopos: composition is associative pointwise", assoc);
    run.check("pretopos: product fibers pair bijectively", products);
    run.check("pretopos: equalizer fibers match the pointwise equalizer", equalizers);
    run.check("pretopos: Boolean subobject laws hold", boolean);
  });
}

void runGroupoidSuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = run.config().universeCap;
  run.guarded("groupoid", [&] {
    GroupoidSlice slice =
        buildGroupoidSlice(corpus.graphLang, corpus.graphThy, cap, run.config().budget);
    run.check("groupoid: axioms verified exhaustively", true,
              std::to_string(slice.models.size()) + " objects, " +
                  std::to_string(slice.morphisms.size()) + " morphisms");

    ImaginarySort ordered = sortFromFormula(Formula::atom("E", {0, 1}, 2));
    FiberedSort edges = buildFiberedSort(ordered, slice);
    FiberedSort home = buildFiberedSort(homeSort(), slice);

    // Equivariance of an interpreted function across the slice: the swap on
    // ordered edges commutes with every transport.
    DefinableFunction swap;
    swap.source = ordered;
    swap.target = ordered;
    Formula e4 = Formula::atom("E", {0, 1}, 4);
    swap.graph = {{Formula::conj(4, {e4, Formula::eq(0, 3, 4), Formula::eq(1, 2, 4)})}};
    bool natural = true;
    std::vector<CodedMap> swapAt;
    for (size_t m = 0; m < slice.models.size(); ++m)
      swapAt.push_back(interpretFunctionInModel(swap, edges.fibers[m], edges.fibers[m]));
    for (size_t g = 0; g < slice.morphisms.size(); ++g) {
      const Isomorphism& iso = slice.morphisms[g];
      CodedMap lhs = CodedMap::compose(swapAt[iso.targetIndex], edges.action[g]);
      CodedMap rhs = CodedMap::compose(edges.action[g], swapAt[iso.sourceIndex]);
      natural = natural && lhs == rhs;
    }
    run.check("groupoid: interpreted functions are equivariant", natural);

    bool functorial = true;
    for (size_t g = 0; g < slice.morphisms.size(); ++g) {
      functorial = functorial &&
                   home.action[slice.unit[slice.morphisms[g].sourceIndex]] ==
                       CodedMap::identity(home.fibers[slice.morphisms[g].sourceIndex].carrier.size);
      for (size_t h = 0; h < slice.morphisms.size(); ++h) {
        if (slice.morphisms[h].sourceIndex != slice.morphisms[g].targetIndex) continue;
        int hg = slice.compose(static_cast<int>(h), static_cast<int>(g));
        functorial = functorial &&
                     CodedMap::compose(home.action[h], home.action[g]) == home.action[hg];
      }
    }
    run.check("groupoid: the fibered action is strictly functorial", functorial);
  });
}

void runVaughtSuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = run.config().universeCap;
  run.guarded("vaught", [&] {
    GroupoidSlice slice =
        buildGroupoidSlice(corpus.graphLang, corpus.graphThy, cap, run.config().budget);
    FiberedSort x1 = buildFiberedSort(homeSort(), slice);

    std::vector<std::pair<int, int>> points;
    for (size_t m = 0; m < x1.fibers.size(); ++m)
      for (int e = 0; e < x1.fibers[m].carrier.size; ++e)
        points.emplace_back(static_cast<int>(m), e);

    // Exhaustive over subsets when small; seeded sample otherwise.
    std::vector<FiberSet> subsets;
    if (points.size() <= 12) {
      for (unsigned long long mask = 0; mask < (1ULL << points.size()); ++mask) {
        FiberSet s = FiberSet::empty(x1);
        for (size_t p = 0; p < points.size(); ++p)
          if ((mask >> p) & 1ULL) s.insert(points[p].first, points[p].second);
        subsets.push_back(std::move(s));
      }
    } else {
      for (int i = 0; i < 64; ++i) {
        FiberSet s = FiberSet::empty(x1);
        for (const auto& [m, e] : points)
          if (run.rng()() % 2) s.insert(m, e);
        subsets.push_back(std::move(s));
      }
    }

    std::vector<std::vector<int>> tuples = {{}, {0}, {1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<std::vector<int>> basicSets;
    for (const std::vector<int>& a : tuples)
      for (const std::vector<int>& b : tuples) {
        if (a.size() != b.size() || !sameEqualityType(a, b)) continue;
        basicSets.push_back(morphismSet(a, b, slice));
      }

    bool complementLaw = true, unionLaw = true, compositionLaw = true, fiberLaw = true;
    for (const FiberSet& b : subsets)
      for (const std::vector<int>& u : basicSets) {
        complementLaw = complementLaw &&
                        vaughtTransform(b, u, VaughtKind::All, x1).complement() ==
                            vaughtTransform(b.complement(), u, VaughtKind::Exist, x1);
      }
    for (size_t i = 0; i < subsets.size(); i += 3)
      for (size_t j = 0; j < subsets.size(); j += 5)
        for (const std::vector<int>& u : basicSets)
          unionLaw = unionLaw &&
                     vaughtTransform(subsets[i].unite(subsets[j]), u, VaughtKind::Exist, x1) ==
                         vaughtTransform(subsets[i], u, VaughtKind::Exist, x1)
                             .unite(vaughtTransform(subsets[j], u, VaughtKind::Exist, x1));
    for (const std::vector<int>& u : basicSets)
      for (const std::vector<int>& v : basicSets) {
        std::vector<int> uv = composeMorphismSets(u, v, slice);
        for (size_t i = 0; i < subsets.size(); i += 7)
          compositionLaw =
              compositionLaw &&
              vaughtTransform(vaughtTransform(subsets[i], u, VaughtKind::All, x1), v,
                              VaughtKind::All, x1) ==
                  vaughtTransform(subsets[i], uv, VaughtKind::All, x1);
      }
    for (size_t i = 0; i < subsets.size(); i += 5)
      for (const std::vector<int>& u : basicSets)
        for (const std::vector<int>& v : basicSets) {
          auto restrict = [&](const std::vector<int>& w) {
            std::vector<int> out;
            for (int g : w) {
              int target = slice.morphisms[g].targetIndex;
              bool hits = false;
              for (int e = 0; e < x1.fibers[target].carrier.size; ++e)
                if (subsets[i].contains(target, e)) hits = true;
              if (hits) out.push_back(g);
            }
            return out;
          };
          if (restrict(u) == restrict(v))
            fiberLaw = fiberLaw &&
                       vaughtTransform(subsets[i], u, VaughtKind::Exist, x1) ==
                           vaughtTransform(subsets[i], v, VaughtKind::Exist, x1);
        }
    run.check("vaught: complement exchanges the transforms", complementLaw);
    run.check("vaught: existential transform preserves unions", unionLaw);
    run.check("vaught: iterated universal transforms compose", compositionLaw);
    run.check("vaught: fiber-agreeing morphism sets transform equally", fiberLaw);
  });
}

void runDefinabilitySuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = std::min(run.config().universeCap, 3);
  run.guarded("definability", [&] {
    Fragment fragment =
        fragmentClose({Formula::negation(Formula::eq(0, 1, 2))}, corpus.graphLang);
    MorleyResult morley = morleyize(corpus.graphLang, corpus.graphThy, fragment);
    GroupoidSlice slice =
        buildGroupoidSlice(morley.targetLanguage, morley.targetTheory, cap, run.config().budget);
    FiberedSort x1 = buildFiberedSort(homePowerSort(1), slice);

    Formula eGuard = Formula::atom("E", {0, 1}, 2);
    std::vector<BasicOpen> neighborOpens;
    for (int d = 0; d < cap; ++d)
      for (int z = 0; z < cap; ++z) neighborOpens.push_back(BasicOpen{1, {d}, eGuard, {d, z}});

    FiberSet neighbors = FiberSet::empty(x1);
    for (const BasicOpen& open : neighborOpens)
      neighbors = neighbors.unite(evalBasicOpen(open, x1));
    Formula phi = synthesizeInvariantOpen(neighborOpens, x1, slice.language);
    run.check("definability: invariant open synthesis is exact",
              evalFormulaSection(phi, {}, x1) == neighbors);
    run.check("definability: synthesized open formulas are coherent", isCoherent(phi));

    bool borelExact = true;
    std::vector<EvalCache> caches(slice.models.size());
    Synthesizer synth(slice.language, cap);
    for (int trial = 0; trial < 8 && borelExact; ++trial) {
      // Random small descriptor over neighbor leaves.
      std::vector<BorelDescriptor::Ptr> leaves;
      for (int i = 0; i < 3; ++i) {
        const BasicOpen& open = neighborOpens[run.rng()() % neighborOpens.size()];
        leaves.push_back(BorelDescriptor::mkLeaf(open));
      }
      BorelDescriptor::Ptr d = BorelDescriptor::mkUnion(leaves, 1);
      if (run.rng()() % 2) d = BorelDescriptor::mkComplement(d);
      std::vector<int> base;
      if (run.rng()() % 2) base.push_back(static_cast<int>(run.rng()() % cap));
      FiberSet b = evalDescriptor(d, x1);
      Formula f = synth.borelTranslate(d, base);
      std::vector<std::vector<int>> prefixes;
      if (base.empty()) prefixes.push_back({});
      else
        for (int a = 0; a < cap; ++a) prefixes.push_back({a});
      for (const std::vector<int>& a : prefixes) {
        if (!sameEqualityType(a, base)) continue;
        borelExact = borelExact &&
                     vaughtTransform(b, morphismSet(a, base, slice), VaughtKind::Exist, x1) ==
                         evalFormulaSection(f, a, x1, &caches);
      }
    }
    run.check("definability: Borel translates match the Vaught transform", borelExact);
  });
}

void runInterpSuite(SuiteRunner& run, const Corpus& corpus) {
  const int cap = run.config().universeCap;
  run.guarded("interp", [&] {
    Interpretation cg;
    cg.sourceLanguage = corpus.graphLang;
    cg.sourceTheory = corpus.graphThy;
    cg.targetLanguage = corpus.orderLang;
    cg.targetTheory = corpus.orderThy;
    cg.homSortImage = homeSort();
    DefinableRelation edge;
    edge.sort = powerSort(cg.homSortImage, 2);
    edge.pieces = {Formula::disj(
        2, {Formula::atom("Lt", {0, 1}, 2), Formula::atom("Lt", {1, 0}, 2)})};
    cg.relationImages = {edge};

    run.check("interp: the comparability interpretation validates",
              validateInterpretation(cg, cap).valid);

    bool lands = true;
    std::vector<FiniteModel> orders =
        enumerateModels(corpus.orderLang, corpus.orderThy, cap, run.config().budget);
    for (const FiniteModel& m : orders) {
      FiniteModel g = applyToModel(cg, m);
      lands = lands && satisfiesTheory(g, corpus.graphThy).allHold();
    }
    run.check("interp: transported models satisfy the source theory", lands);

    GroupoidSlice slice =
        buildGroupoidSlice(corpus.orderLang, corpus.orderThy, cap, run.config().budget);
    bool functorial = true;
    for (const Isomorphism& g : slice.morphisms)
      for (const Isomorphism& h : slice.morphisms) {
        if (h.sourceIndex != g.targetIndex) continue;
        std::vector<int> hg(g.permutation.size());
        for (size_t i = 0; i < hg.size(); ++i) hg[i] = h.permutation[g.permutation[i]];
        std::vector<int> direct = applyToIso(cg, slice.models[g.sourceIndex],
                                             slice.models[h.targetIndex], hg);
        std::vector<int> gT = applyToIso(cg, slice.models[g.sourceIndex],
                                         slice.models[g.targetIndex], g.permutation);
        std::vector<int> hT = applyToIso(cg, slice.models[h.sourceIndex],
                                         slice.models[h.targetIndex], h.permutation);
        for (size_t i = 0; i < direct.size(); ++i)
          functorial = functorial && direct[i] == hT[gT[i]];
      }
    run.check("interp: model transport is strictly functorial", functorial);

    Interpretation id = identityInterpretation(corpus.graphLang, corpus.graphThy);
    ComposedInterpretation composed = composeInterpretations(cg, id, std::min(cap, 3));
    bool zetaIdentity = true;
    for (const CodedMap& z : composed.zeta)
      zetaIdentity = zetaIdentity && z == CodedMap::identity(z.sourceSize);
    run.check("interp: composition with the identity has identity comparison maps",
              zetaIdentity);
  });
}

} // namespace

VerifyReport runVerifySuite(const RunConfig& config, const std::string& suite) {
  VerifyReport report;
  report.suite = suite;
  report.cap = config.universeCap;
  report.seed = config.seed;
  SuiteRunner run(config, report);
  Corpus corpus = builtinCorpus();

  bool known = false;
  auto want = [&](const char* name) {
    bool match = suite == name || suite == "all";
    known = known || match;
    return match;
  };
  if (want("morley")) runMorleySuite(run, corpus);
  if (want("pretopos")) runPretoposSuite(run, corpus);
  if (want("groupoid")) runGroupoidSuite(run, corpus);
  if (want("vaught")) runVaughtSuite(run, corpus);
  if (want("definability")) runDefinabilitySuite(run, corpus);
  if (want("interp")) runInterpSuite(run, corpus);
  if (!known)
    throw Error("unknown suite " + suite +
                " (expected morley, pretopos, groupoid, vaught, definability, interp, all)");
  return report;
}

std::string reportToText(const VerifyReport& report) {
  std::ostringstream out;
  out << "suite " << report.suite << " cap " << report.cap << " seed " << report.seed << "\n";
  for (const VerifyCheck& c : report.checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
  out << report.passCount() << " passed, " << report.failCount() << " failed\n";
  return out.str();
}

Json reportToJson(const VerifyReport& report) {
  Json j;
  j["suite"] = report.suite;
  j["cap"] = report.cap;
  j["seed"] = report.seed;
  Json checks = Json::array();
  for (const VerifyCheck& c : report.checks) {
    Json check;
    check["name"] = c.name;
    check["pass"] = c.pass;
    check["detail"] = c.detail;
    checks.push_back(check);
  }
  j["checks"] = checks;
  j["passed"] = report.passCount();
  j["failed"] = report.failCount();
  return j;
}

} // namespace ilwb
