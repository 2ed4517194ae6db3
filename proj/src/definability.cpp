#include "ilwb/definability.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ilwb/errors.hpp"

namespace ilwb {

namespace {

Formula embed(const Formula& f, int offset, int newContext) {
  std::vector<int> map(f.contextSize());
  for (int i = 0; i < f.contextSize(); ++i) map[i] = offset + i;
  return substituteVariables(f, map, newContext);
}

} // namespace

BasicOpen BasicOpen::wholeSpace(int pointArity) {
  if (pointArity != 0)
    throw Error("only the X^0 fiber is a single basic open; use a union otherwise");
  return BasicOpen{0, {}, Formula::top(0), {}};
}

bool isBasicFormula(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Atom:
      return true;
    case FormulaKind::And:
      for (const Formula& p : f.parts())
        if (!isBasicFormula(p)) return false;
      return true;
    default:
      return false;
  }
}

BorelDescriptor::Ptr BorelDescriptor::mkLeaf(BasicOpen open) {
  if (!isBasicFormula(open.guard))
    throw Error("basic open guard must be a conjunction of atomic relations");
  if (static_cast<int>(open.guardArgs.size()) != open.guard.contextSize())
    throw Error("basic open guard argument count mismatch");
  if (static_cast<int>(open.section.size()) != open.pointArity)
    throw Error("basic open section length mismatch");
  auto d = std::make_shared<BorelDescriptor>();
  d->kind = Kind::Leaf;
  d->leaf = std::move(open);
  return d;
}

BorelDescriptor::Ptr BorelDescriptor::mkUnion(std::vector<Ptr> children, int pointArity) {
  for (const Ptr& c : children)
    if (c->pointArity() != pointArity)
      throw Error("descriptor union members disagree on the point arity");
  auto d = std::make_shared<BorelDescriptor>();
  d->kind = Kind::Union;
  d->leaf.pointArity = pointArity;
  d->children = std::move(children);
  return d;
}

BorelDescriptor::Ptr BorelDescriptor::mkComplement(Ptr child) {
  auto d = std::make_shared<BorelDescriptor>();
  d->kind = Kind::Complement;
  d->leaf.pointArity = child->pointArity();
  d->children = {std::move(child)};
  return d;
}

int BorelDescriptor::pointArity() const { return leaf.pointArity; }

FiberSet evalBasicOpen(const BasicOpen& open, const FiberedSort& xn) {
  FiberSet out = FiberSet::empty(xn);
  const GroupoidSlice& slice = *xn.slice;
  for (size_t m = 0; m < slice.models.size(); ++m) {
    const FiniteModel& model = slice.models[m];
    bool inRange = true;
    for (int v : open.section)
      if (v >= model.size) inRange = false;
    for (int v : open.guardArgs)
      if (v >= model.size) inRange = false;
    if (!inRange) continue;
    if (!evalFormula(open.guard, model).contains(open.guardArgs)) continue;
    int cls = xn.fibers[m].classIndex(0, open.section);
    out.insert(static_cast<int>(m), cls);
  }
  return out;
}

FiberSet evalDescriptor(const BorelDescriptor::Ptr& d, const FiberedSort& xn) {
  switch (d->kind) {
    case BorelDescriptor::Kind::Leaf:
      return evalBasicOpen(d->leaf, xn);
    case BorelDescriptor::Kind::Union: {
      FiberSet out = FiberSet::empty(xn);
      for (const BorelDescriptor::Ptr& c : d->children) out = out.unite(evalDescriptor(c, xn));
      return out;
    }
    case BorelDescriptor::Kind::Complement:
      return evalDescriptor(d->children[0], xn).complement();
  }
  throw Error("unreachable");
}

Formula sizeAtLeast(const Language& language, int n) {
  std::vector<Formula> distinct;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) distinct.push_back(inequality(language, i, j, n));
  return Formula::existsMany(n, Formula::conj(n, std::move(distinct)));
}

Formula tupleInModel(const Language& language, const std::vector<int>& tuple) {
  int needed = 0;
  for (int v : tuple) needed = std::max(needed, v + 1);
  return sizeAtLeast(language, needed);
}

Formula equalityType(const Language& language, const std::vector<int>& tuple) {
  const int n = static_cast<int>(tuple.size());
  std::vector<Formula> parts;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (tuple[i] == tuple[j]) parts.push_back(Formula::eq(i, j, n));
      else parts.push_back(inequality(language, i, j, n));
    }
  return Formula::conj(n, std::move(parts));
}

Formula orbitContains(const Language& language, const std::vector<int>& tuple) {
  const int n = static_cast<int>(tuple.size());
  return Formula::conj(n, {embed(tupleInModel(language, tuple), 0, n),
                           equalityType(language, tuple)});
}

Formula Synthesizer::orbitFormula(const std::vector<int>& tuple) {
  auto it = orbitMemo_.find(tuple);
  if (it != orbitMemo_.end()) return it->second;
  Formula f = orbitContains(language_, tuple);
  orbitMemo_.emplace(tuple, f);
  return f;
}

Formula Synthesizer::openTranslate(const BasicOpen& open, const std::vector<int>& base) {
  const int k = static_cast<int>(base.size());
  const int n = open.pointArity;
  const int l = open.guard.contextSize();
  const int inner = k + n + l;
  std::vector<int> full = base;
  full.insert(full.end(), open.section.begin(), open.section.end());
  full.insert(full.end(), open.guardArgs.begin(), open.guardArgs.end());
  Formula sPart = orbitFormula(full);  // identity variable layout
  std::vector<int> guardMap(l);
  for (int i = 0; i < l; ++i) guardMap[i] = k + n + i;
  Formula guardPart = subst_.apply(open.guard, guardMap, inner);
  return Formula::existsMany(l, Formula::conj(inner, {sPart, guardPart}));
}

namespace {

// Injective extension tails over {0..capN-1} avoiding the base entries, in
// all lengths; these suffice for exactness on slices of cap <= capN.
std::vector<std::vector<int>> extensionTails(const std::vector<int>& base, int capN) {
  std::set<int> taken(base.begin(), base.end());
  std::vector<int> pool;
  for (int v = 0; v < capN; ++v)
    if (!taken.count(v)) pool.push_back(v);
  std::vector<std::vector<int>> out = {{}};
  std::vector<int> current;
  std::vector<bool> used(pool.size(), false);
  auto recurse = [&](auto&& self) -> void {
    for (size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      current.push_back(pool[i]);
      out.push_back(current);
      self(self);
      current.pop_back();
      used[i] = false;
    }
  };
  recurse(recurse);
  return out;
}

} // namespace

Formula Synthesizer::borelTranslate(const BorelDescriptor::Ptr& d, const std::vector<int>& base) {
  auto key = std::make_pair(d, base);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  const int k = static_cast<int>(base.size());
  const int n = d->pointArity();
  Formula result;
  switch (d->kind) {
    case BorelDescriptor::Kind::Leaf:
      result = openTranslate(d->leaf, base);
      break;
    case BorelDescriptor::Kind::Union: {
      std::vector<Formula> parts;
      for (const BorelDescriptor::Ptr& c : d->children) parts.push_back(borelTranslate(c, base));
      result = Formula::disj(k + n, std::move(parts));
      break;
    }
    case BorelDescriptor::Kind::Complement: {
      std::vector<Formula> disjuncts;
      for (const std::vector<int>& tail : extensionTails(base, capN_)) {
        std::vector<int> extended = base;
        extended.insert(extended.end(), tail.begin(), tail.end());
        const int m = static_cast<int>(extended.size());
        const int bound = m - k;
        const int inner = k + n + bound;
        // The m-tuple addressed by the extension: the k free prefix variables
        // followed by the freshly bound ones on top.
        std::vector<int> layout;
        for (int i = 0; i < k; ++i) layout.push_back(i);
        for (int i = 0; i < bound; ++i) layout.push_back(k + n + i);
        Formula sPart = subst_.apply(orbitFormula(extended), layout, inner);
        Formula inductive = borelTranslate(d->children[0], extended);  // m + n variables
        std::vector<int> map = layout;
        for (int i = 0; i < n; ++i) map.push_back(k + i);
        Formula shifted = subst_.apply(inductive, map, inner);
        disjuncts.push_back(Formula::existsMany(
            bound, Formula::conj(inner, {sPart, Formula::negation(shifted)})));
      }
      result = Formula::disj(k + n, std::move(disjuncts));
      break;
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

Formula synthesizeOpenTranslate(const BasicOpen& open, const std::vector<int>& base,
                                const Language& language, int capN) {
  Synthesizer s(language, capN);
  return s.openTranslate(open, base);
}

Formula synthesizeBorelTranslate(const BorelDescriptor::Ptr& d, const std::vector<int>& base,
                                 const Language& language, int capN) {
  Synthesizer s(language, capN);
  return s.borelTranslate(d, base);
}

namespace {

void requireInvariant(const FiberSet& u, const FiberedSort& xn, const char* who) {
  const GroupoidSlice& slice = *xn.slice;
  for (size_t g = 0; g < slice.morphisms.size(); ++g) {
    const Isomorphism& iso = slice.morphisms[g];
    const CodedMap& act = xn.action[g];
    for (int e = 0; e < act.sourceSize; ++e) {
      bool src = u.contains(iso.sourceIndex, e);
      bool dst = u.contains(iso.targetIndex, act.values[e]);
      if (src != dst) {
        std::ostringstream msg;
        msg << who << ": set is not invariant; morphism " << g << " moves element " << e
            << " of model " << iso.sourceIndex << (src ? " out of" : " into") << " the set";
        throw Error(msg.str());
      }
    }
  }
}

} // namespace

Formula synthesizeInvariantOpen(const std::vector<BasicOpen>& opens, const FiberedSort& xn,
                                const Language& language) {
  FiberSet u = FiberSet::empty(xn);
  int n = 0;
  for (const BasicOpen& open : opens) {
    n = open.pointArity;
    u = u.unite(evalBasicOpen(open, xn));
  }
  requireInvariant(u, xn, "synthesizeInvariantOpen");
  Synthesizer s(language, xn.slice->cap);
  std::vector<Formula> parts;
  for (const BasicOpen& open : opens) parts.push_back(s.openTranslate(open, {}));
  return Formula::disj(n, std::move(parts));
}

Formula synthesizeInvariantBorel(const BorelDescriptor::Ptr& d, const FiberedSort& xn,
                                 const Language& language, int capN) {
  FiberSet b = evalDescriptor(d, xn);
  requireInvariant(b, xn, "synthesizeInvariantBorel");
  Synthesizer s(language, capN);
  return s.borelTranslate(d, {});
}

PointSetSeparator::PointSetSeparator(const FiberedSort& xn, int pointArity,
                                     const std::vector<std::string>& probeRelations)
    : xn_(xn), pointArity_(pointArity) {
  const GroupoidSlice& slice = *xn.slice;
  const int cap = slice.cap;
  const int n = pointArity;

  std::vector<RelationSymbol> probes;
  for (const RelationSymbol& r : slice.language.relations)
    if (probeRelations.empty() ||
        std::find(probeRelations.begin(), probeRelations.end(), r.name) != probeRelations.end())
      probes.push_back(r);

  // Separating generator family: every section tuple crossed with size
  // indicators and single probe atoms.
  std::vector<std::vector<int>> sections = {{}};
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<int>> next;
    for (const std::vector<int>& s : sections)
      for (int v = 0; v < cap; ++v) {
        std::vector<int> t = s;
        t.push_back(v);
        next.push_back(std::move(t));
      }
    sections = std::move(next);
  }
  for (const std::vector<int>& section : sections) {
    for (int l = 0; l <= cap; ++l) {
      std::vector<int> args(l);
      for (int i = 0; i < l; ++i) args[i] = i;
      generators_.push_back(BorelDescriptor::mkLeaf(BasicOpen{n, section, Formula::top(l), args}));
    }
    for (const RelationSymbol& r : probes) {
      std::vector<int> ids(r.arity);
      for (int i = 0; i < r.arity; ++i) ids[i] = i;
      Formula atomGuard = Formula::atom(r.name, ids, r.arity);
      std::vector<std::vector<int>> argTuples = {{}};
      for (int i = 0; i < r.arity; ++i) {
        std::vector<std::vector<int>> next;
        for (const std::vector<int>& t : argTuples)
          for (int v = 0; v < cap; ++v) {
            std::vector<int> e = t;
            e.push_back(v);
            next.push_back(std::move(e));
          }
        argTuples = std::move(next);
      }
      for (const std::vector<int>& args : argTuples)
        generators_.push_back(BorelDescriptor::mkLeaf(BasicOpen{n, section, atomGuard, args}));
    }
  }
  for (const BorelDescriptor::Ptr& g : generators_) {
    generatorSets_.push_back(evalDescriptor(g, xn_));
    complemented_.push_back(BorelDescriptor::mkComplement(g));
  }
}

BorelDescriptor::Ptr PointSetSeparator::descriptorFor(const FiberSet& points) const {
  std::vector<BorelDescriptor::Ptr> pointAtoms;
  for (size_t m = 0; m < points.bits.size(); ++m)
    for (size_t e = 0; e < points.bits[m].size(); ++e) {
      if (!points.bits[m][e]) continue;
      std::vector<BorelDescriptor::Ptr> away;
      for (size_t g = 0; g < generators_.size(); ++g) {
        if (generatorSets_[g].contains(static_cast<int>(m), static_cast<int>(e)))
          away.push_back(complemented_[g]);
        else
          away.push_back(generators_[g]);
      }
      pointAtoms.push_back(
          BorelDescriptor::mkComplement(BorelDescriptor::mkUnion(std::move(away), pointArity_)));
    }
  BorelDescriptor::Ptr result = BorelDescriptor::mkUnion(std::move(pointAtoms), pointArity_);
  if (!(evalDescriptor(result, xn_) == points))
    throw Error("descriptorForPointSet: probe relations do not separate the points");
  return result;
}

BorelDescriptor::Ptr descriptorForPointSet(const FiberSet& points, const FiberedSort& xn,
                                           int pointArity,
                                           const std::vector<std::string>& probeRelations) {
  PointSetSeparator separator(xn, pointArity, probeRelations);
  return separator.descriptorFor(points);
}

FiberSet evalFormulaSection(const Formula& phi, const std::vector<int>& prefix,
                            const FiberedSort& xn, std::vector<EvalCache>* caches) {
  const GroupoidSlice& slice = *xn.slice;
  const int k = static_cast<int>(prefix.size());
  const int n = phi.contextSize() - k;
  if (n < 0) throw Error("evalFormulaSection: prefix longer than the formula context");
  FiberSet out = FiberSet::empty(xn);
  for (size_t m = 0; m < slice.models.size(); ++m) {
    const FiniteModel& model = slice.models[m];
    bool inRange = true;
    for (int v : prefix)
      if (v >= model.size) inRange = false;
    if (!inRange) continue;
    EvalCache* cache = caches ? &(*caches)[m] : nullptr;
    TupleSet set = evalFormula(phi, model, cache);
    // The n-tuple suffixes of the fixed prefix sit at consecutive ranks and
    // their order matches the fiber's canonical class numbering.
    size_t suffixCount = 1;
    for (int i = 0; i < n; ++i) suffixCount *= static_cast<size_t>(model.size);
    if (model.size == 0 && n > 0) suffixCount = 0;
    size_t prefixRank = TupleSet::rank(prefix, model.size);
    for (size_t s = 0; s < suffixCount; ++s)
      if (set.bit(prefixRank * suffixCount + s))
        out.insert(static_cast<int>(m), static_cast<int>(s));
  }
  return out;
}

} // namespace ilwb
