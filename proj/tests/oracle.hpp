#pragma once

// Test-only oracles, kept independent of the library's evaluation and
// enumeration paths: a per-assignment recursive truth checker and a filter
// over all structures.

#include <random>
#include <string>
#include <vector>

#include "ilwb/semantics.hpp"
#include "ilwb/syntax.hpp"

namespace oracle {

using namespace ilwb;

// Truth of f at one assignment, by direct recursion (no tuple sets).
inline bool naiveHolds(const Formula& f, const FiniteModel& model, std::vector<int>& assignment) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      std::vector<int> tuple;
      for (int a : f.args()) tuple.push_back(assignment[a]);
      const FiniteModel::Table* t = model.find(f.relation());
      for (const std::vector<int>& row : t->tuples)
        if (row == tuple) return true;
      return false;
    }
    case FormulaKind::Eq:
      return assignment[f.args()[0]] == assignment[f.args()[1]];
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::And:
      for (const Formula& p : f.parts())
        if (!naiveHolds(p, model, assignment)) return false;
      return true;
    case FormulaKind::Or:
      for (const Formula& p : f.parts())
        if (naiveHolds(p, model, assignment)) return true;
      return false;
    case FormulaKind::Not:
      return !naiveHolds(f.child(), model, assignment);
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      bool universal = f.kind() == FormulaKind::Forall;
      assignment.push_back(0);
      for (int v = 0; v < model.size; ++v) {
        assignment.back() = v;
        bool b = naiveHolds(f.child(), model, assignment);
        if (b != universal) {
          assignment.pop_back();
          return !universal;
        }
      }
      assignment.pop_back();
      return universal;
    }
  }
  return false;
}

inline std::vector<std::vector<int>> naiveEval(const Formula& f, const FiniteModel& model) {
  std::vector<std::vector<int>> out;
  const int n = f.contextSize();
  std::vector<int> assignment(n, 0);
  if (model.size == 0) {
    if (n == 0 && naiveHolds(f, model, assignment)) out.push_back({});
    return out;
  }
  while (true) {
    if (naiveHolds(f, model, assignment)) out.push_back(assignment);
    int pos = n - 1;
    while (pos >= 0 && assignment[pos] == model.size - 1) assignment[pos--] = 0;
    if (pos < 0) break;
    ++assignment[pos];
  }
  return out;
}

// All structures for the language of the given size, by direct bitmap
// counting (no pruning; independent of enumerateModels).
inline std::vector<FiniteModel> allStructures(const Language& language, int size) {
  std::vector<FiniteModel> out;
  std::vector<std::vector<std::vector<int>>> tupleSpace;
  for (const RelationSymbol& r : language.relations) {
    std::vector<std::vector<int>> tuples = {{}};
    for (int i = 0; i < r.arity; ++i) {
      std::vector<std::vector<int>> next;
      for (const std::vector<int>& t : tuples)
        for (int v = 0; v < size; ++v) {
          std::vector<int> e = t;
          e.push_back(v);
          next.push_back(std::move(e));
        }
      tuples = std::move(next);
    }
    if (size == 0 && r.arity > 0) tuples.clear();
    tupleSpace.push_back(std::move(tuples));
  }
  std::vector<size_t> choice;
  for (const auto& space : tupleSpace) choice.push_back(0);
  auto build = [&](const std::vector<size_t>& masks) {
    FiniteModel m = FiniteModel::empty(language, size);
    for (size_t r = 0; r < tupleSpace.size(); ++r)
      for (size_t t = 0; t < tupleSpace[r].size(); ++t)
        if ((masks[r] >> t) & 1) m.tables[r].tuples.push_back(tupleSpace[r][t]);
    m.normalize();
    return m;
  };
  std::vector<size_t> masks(tupleSpace.size(), 0);
  while (true) {
    out.push_back(build(masks));
    size_t pos = 0;
    while (pos < masks.size()) {
      ++masks[pos];
      if (masks[pos] < (size_t{1} << tupleSpace[pos].size())) break;
      masks[pos] = 0;
      ++pos;
    }
    if (pos == masks.size()) break;
  }
  return out;
}

inline std::vector<FiniteModel> allModels(const Language& language, const Theory& theory,
                                          int cap) {
  std::vector<FiniteModel> out;
  for (int size = 0; size <= cap; ++size)
    for (const FiniteModel& m : allStructures(language, size))
      if (satisfiesTheory(m, theory).allHold()) out.push_back(m);
  return out;
}

// ---- shared fixtures ----

inline std::pair<Language, Theory> graphTheory() {
  const char* text =
      "language { E/2; }\n"
      "theory {\n"
      "  axiom forall x . E(x,x) => false;\n"
      "  axiom forall x y . E(x,y) => E(y,x);\n"
      "}\n";
  return parseTheory(text);
}

inline std::pair<Language, Theory> linearOrderTheory() {
  const char* text =
      "language { Lt/2; }\n"
      "decidable via or(Lt(x,y), Lt(y,x));\n"
      "theory {\n"
      "  axiom forall x . Lt(x,x) => false;\n"
      "  axiom forall x y z . and(Lt(x,y), Lt(y,z)) => Lt(x,z);\n"
      "  axiom forall x y . true => or(Lt(x,y), Lt(y,x), x = y);\n"
      "}\n";
  return parseTheory(text);
}

// Path 0-1-2.
inline FiniteModel pathP2(const Language& graphLanguage) {
  FiniteModel m = FiniteModel::empty(graphLanguage, 3);
  m.tables[0].tuples = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  m.normalize();
  return m;
}

inline FiniteModel completeK2(const Language& graphLanguage) {
  FiniteModel m = FiniteModel::empty(graphLanguage, 2);
  m.tables[0].tuples = {{0, 1}, {1, 0}};
  m.normalize();
  return m;
}

// Seeded random coherent formulas over a language.
class CoherentGen {
public:
  CoherentGen(const Language& language, uint64_t seed) : language_(language), rng_(seed) {}

  Formula gen(int context, int depth) {
    int pick = depth <= 0 ? static_cast<int>(rng_() % 3) : static_cast<int>(rng_() % 6);
    switch (pick) {
      case 0: {  // atom
        std::vector<const RelationSymbol*> usable;
        for (const RelationSymbol& r : language_.relations)
          if (r.arity == 0 || context > 0) usable.push_back(&r);
        if (usable.empty()) return Formula::top(context);
        const RelationSymbol& r = *usable[rng_() % usable.size()];
        std::vector<int> args;
        for (int i = 0; i < r.arity; ++i) args.push_back(static_cast<int>(rng_() % context));
        return Formula::atom(r.name, args, context);
      }
      case 1:
        if (context == 0) return Formula::top(context);
        return Formula::eq(static_cast<int>(rng_() % context), static_cast<int>(rng_() % context),
                           context);
      case 2:
        return rng_() % 2 ? Formula::top(context) : Formula::bottom(context);
      case 3:
      case 4: {
        int count = 1 + static_cast<int>(rng_() % 3);
        std::vector<Formula> parts;
        for (int i = 0; i < count; ++i) parts.push_back(gen(context, depth - 1));
        return pick == 3 ? Formula::conj(context, parts) : Formula::disj(context, parts);
      }
      default:
        return Formula::exists(gen(context + 1, depth - 1));
    }
  }

  // Arbitrary L_omega1omega formulas (adds negation and forall).
  Formula genBoolean(int context, int depth) {
    int pick = depth <= 0 ? static_cast<int>(rng_() % 3) : static_cast<int>(rng_() % 8);
    if (pick == 6) return Formula::negation(genBoolean(context, depth - 1));
    if (pick == 7) return Formula::forall(genBoolean(context + 1, depth - 1));
    if (pick == 5) return Formula::exists(genBoolean(context + 1, depth - 1));
    if (pick == 3 || pick == 4) {
      int count = 1 + static_cast<int>(rng_() % 3);
      std::vector<Formula> parts;
      for (int i = 0; i < count; ++i) parts.push_back(genBoolean(context, depth - 1));
      return pick == 3 ? Formula::conj(context, parts) : Formula::disj(context, parts);
    }
    return gen(context, 0);
  }

  std::mt19937_64& rng() { return rng_; }

private:
  const Language& language_;
  std::mt19937_64 rng_;
};

} // namespace oracle
