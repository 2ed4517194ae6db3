#include "ilwb/morley.hpp"

#include <algorithm>
#include <sstream>

#include "ilwb/errors.hpp"

namespace ilwb {

namespace {

std::string hex(uint64_t value, int digits) {
  static const char* alphabet = "0123456789abcdef";
  std::string s(digits, '0');
  for (int i = digits - 1; i >= 0; --i) {
    s[i] = alphabet[value & 0xf];
    value >>= 4;
  }
  return s;
}

// Pinning rank: a fragment formula's fresh relation is fixed by schema axioms
// whose other relations all have strictly smaller rank.  Declaring relations
// in rank order lets the model enumerator prune level by level.
int pinningRank(const Formula& f, std::map<Formula, int>& memo) {
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  memo.emplace(f, 0);  // placeholder against cycles (none occur structurally)
  int rank = 0;
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
    case FormulaKind::True:
    case FormulaKind::False:
      rank = 0;
      break;
    case FormulaKind::Or:
    case FormulaKind::Exists:
    case FormulaKind::Not:
      for (const Formula& p : f.parts()) rank = std::max(rank, pinningRank(p, memo) + 1);
      break;
    case FormulaKind::And:
      for (const Formula& p : f.parts())
        rank = std::max(rank, pinningRank(Formula::negation(p), memo) + 1);
      break;
    case FormulaKind::Forall:
      rank = pinningRank(Formula::negation(Formula::exists(Formula::negation(f.child()))), memo) + 1;
      break;
  }
  memo[f] = rank;
  return rank;
}

Formula identityAtom(const RelationSymbol& rel, int contextSize) {
  std::vector<int> args(rel.arity);
  for (int i = 0; i < rel.arity; ++i) args[i] = i;
  return Formula::atom(rel.name, std::move(args), contextSize);
}

} // namespace

const RelationSymbol& MorleyResult::relationFor(const Formula& f) const {
  auto it = formulaIndex.find(f);
  if (it == formulaIndex.end()) throw Error("formula is not in the Morleyized fragment");
  return it->second;
}

Formula MorleyResult::freshAtom(const Formula& f) const {
  return identityAtom(relationFor(f), f.contextSize());
}

MorleyResult morleyize(const Language& language, const Theory& theory, const Fragment& fragment) {
  MorleyResult result;
  result.sourceLanguage = language;
  result.sourceTheory = theory;
  result.fragment = fragment;

  // Fresh names from the printed canonical form; collisions (none expected at
  // this scale) extend to the full hash.
  std::map<Formula, RelationSymbol> index;
  std::map<std::string, Formula> taken;
  for (const Formula& f : fragment.formulas) {
    uint64_t h = fnv1a64(printFormula(f) + "#" + std::to_string(f.contextSize()));
    std::string name = "R_" + hex(h, 8);
    if (taken.count(name)) name = "R_" + hex(h, 16);
    while (taken.count(name)) name += "x";
    taken.emplace(name, f);
    index.emplace(f, RelationSymbol{name, f.contextSize()});
  }

  Language target;
  target.relations = language.relations;
  for (const RelationSymbol& r : target.relations)
    if (r.name.rfind("R_", 0) == 0)
      throw Error("source relation name " + r.name + " collides with the fresh-name scheme");

  std::vector<Formula> ordered(fragment.formulas.begin(), fragment.formulas.end());
  std::map<Formula, int> ranks;
  for (const Formula& f : ordered) pinningRank(f, ranks);
  std::stable_sort(ordered.begin(), ordered.end(), [&](const Formula& a, const Formula& b) {
    if (ranks[a] != ranks[b]) return ranks[a] < ranks[b];
    return a < b;
  });
  for (const Formula& f : ordered) target.relations.push_back(index.at(f));

  result.formulaIndex = index;

  auto inFragment = [&](const Formula& f) { return fragment.contains(f); };
  auto fresh = [&](const Formula& f) {
    if (!inFragment(f)) throw Error("fragment is not closed: missing " + printFormula(f));
    return identityAtom(index.at(f), f.contextSize());
  };

  Theory targetTheory;
  std::vector<CoherentAxiom>& axioms = targetTheory.coherentAxioms;
  auto iff = [&](const Formula& lhs, const Formula& rhs) {
    int n = lhs.contextSize();
    axioms.push_back({n, lhs, rhs});
    axioms.push_back({n, rhs, lhs});
  };

  for (const Formula& f : ordered) {
    const int n = f.contextSize();
    switch (f.kind()) {
      case FormulaKind::Atom:
      case FormulaKind::Eq:
      case FormulaKind::True:
      case FormulaKind::False:
        iff(fresh(f), f);
        break;
      case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const Formula& p : f.parts()) {
          if (!inFragment(p)) throw Error("fragment is not subformula-closed");
          parts.push_back(fresh(p));
        }
        iff(fresh(f), Formula::disj(n, std::move(parts)));
        break;
      }
      case FormulaKind::Exists:
        iff(fresh(f), Formula::exists(fresh(f.child())));
        break;
      case FormulaKind::Not: {
        Formula body = fresh(f.child());
        axioms.push_back({n, Formula::conj(n, {body, fresh(f)}), Formula::bottom(n)});
        axioms.push_back({n, Formula::top(n), Formula::disj(n, {body, fresh(f)})});
        break;
      }
      case FormulaKind::And: {
        std::vector<Formula> negatives;
        for (const Formula& p : f.parts()) {
          axioms.push_back({n, fresh(f), fresh(p)});
          Formula np = Formula::negation(p);
          if (!inFragment(np))
            throw Error("fragment lacks a negated conjunct required by the schema");
          negatives.push_back(fresh(np));
        }
        std::vector<Formula> lower = {fresh(f)};
        lower.insert(lower.end(), negatives.begin(), negatives.end());
        axioms.push_back({n, Formula::top(n), Formula::disj(n, std::move(lower))});
        break;
      }
      case FormulaKind::Forall: {
        Formula partner = Formula::negation(Formula::exists(Formula::negation(f.child())));
        if (!inFragment(partner))
          throw Error("fragment lacks the not-exists-not partner of a forall member");
        iff(fresh(f), fresh(partner));
        break;
      }
    }
  }

  // Source axioms, carried through the fresh relations.  True/False sides
  // pass through unchanged.
  auto carry = [&](const Formula& side) -> Formula {
    if (side.kind() == FormulaKind::True || side.kind() == FormulaKind::False) return side;
    if (!inFragment(side)) throw Error("axiom formula not in fragment: " + printFormula(side));
    return fresh(side);
  };
  for (const CoherentAxiom& ax : theory.coherentAxioms)
    axioms.push_back({ax.contextSize, carry(ax.lhs), carry(ax.rhs)});
  for (const Formula& s : theory.sentences) {
    if (!inFragment(s)) throw Error("axiom formula not in fragment: " + printFormula(s));
    axioms.push_back({0, Formula::top(0), fresh(s)});
  }

  // The fresh relation for x != y witnesses decidability; otherwise any
  // witness of the source language remains valid.
  Formula neq = Formula::negation(Formula::eq(0, 1, 2));
  if (fragment.contains(neq)) {
    target.decidabilityWitness = identityAtom(index.at(neq), 2);
  } else if (language.decidabilityWitness) {
    target.decidabilityWitness = language.decidabilityWitness;
  }

  targetTheory.language = target;
  result.targetLanguage = target;
  result.targetTheory = targetTheory;
  return result;
}

FiniteModel expandModel(const FiniteModel& model, const MorleyResult& result) {
  if (!satisfiesTheory(model, result.sourceTheory).allHold())
    throw Error("expandModel requires a model of the source theory");
  FiniteModel expanded;
  expanded.size = model.size;
  for (const RelationSymbol& r : result.targetLanguage.relations) {
    const FiniteModel::Table* original = model.find(r.name);
    if (original) {
      expanded.tables.push_back(*original);
      continue;
    }
    // Fresh relation: locate its source formula and evaluate.
    const Formula* source = nullptr;
    for (const auto& [f, rel] : result.formulaIndex)
      if (rel.name == r.name) {
        source = &f;
        break;
      }
    if (!source) throw Error("target relation " + r.name + " has no source formula");
    FiniteModel::Table table{r.name, r.arity, evalFormula(*source, model).tuples()};
    expanded.tables.push_back(std::move(table));
  }
  return expanded;
}

FiniteModel reductModel(const FiniteModel& expanded, const Language& language) {
  FiniteModel reduced;
  reduced.size = expanded.size;
  for (const RelationSymbol& r : language.relations) {
    const FiniteModel::Table* t = expanded.find(r.name);
    if (!t) throw LanguageMismatch("expanded model lacks relation " + r.name);
    reduced.tables.push_back(*t);
  }
  return reduced;
}

Formula translateFragmentDisjunction(const std::vector<Formula>& disjuncts,
                                     const MorleyResult& result) {
  if (disjuncts.empty()) return Formula::bottom(0);
  int n = disjuncts.front().contextSize();
  std::vector<Formula> parts;
  for (const Formula& f : disjuncts) {
    if (f.contextSize() != n) throw Error("disjuncts must share a context");
    if (!result.fragment.contains(f))
      throw Error("formula outside fragment: " + printFormula(f));
    parts.push_back(result.freshAtom(f));
  }
  return Formula::disj(n, std::move(parts));
}

} // namespace ilwb
