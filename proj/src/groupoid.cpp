#include "ilwb/groupoid.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ilwb/errors.hpp"
#include "ilwb/parallel.hpp"

namespace ilwb {

std::vector<Isomorphism> enumerateIsomorphisms(const FiniteModel& source,
                                               const FiniteModel& target) {
  std::vector<Isomorphism> out;
  if (source.size != target.size || source.tables.size() != target.tables.size()) return out;
  for (size_t t = 0; t < source.tables.size(); ++t) {
    if (source.tables[t].relation != target.tables[t].relation) return out;
    if (source.tables[t].tuples.size() != target.tables[t].tuples.size()) return out;
  }
  std::vector<int> perm(source.size);
  std::iota(perm.begin(), perm.end(), 0);
  if (source.size == 0) {
    bool ok = true;
    for (size_t t = 0; t < source.tables.size(); ++t)
      if (source.tables[t].tuples != target.tables[t].tuples) ok = false;
    if (ok) out.push_back({-1, -1, {}});
    return out;
  }
  do {
    bool ok = true;
    for (size_t t = 0; t < source.tables.size() && ok; ++t)
      for (const std::vector<int>& tuple : source.tables[t].tuples) {
        std::vector<int> image;
        image.reserve(tuple.size());
        for (int v : tuple) image.push_back(perm[v]);
        if (!std::binary_search(target.tables[t].tuples.begin(), target.tables[t].tuples.end(),
                                image)) {
          ok = false;
          break;
        }
      }
    if (ok) out.push_back({-1, -1, perm});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

int GroupoidSlice::morphismIndex(int sourceIndex, int targetIndex,
                                 const std::vector<int>& permutation) const {
  Isomorphism probe{sourceIndex, targetIndex, permutation};
  auto it = std::lower_bound(morphisms.begin(), morphisms.end(), probe,
                             [](const Isomorphism& a, const Isomorphism& b) {
                               if (a.sourceIndex != b.sourceIndex)
                                 return a.sourceIndex < b.sourceIndex;
                               if (a.targetIndex != b.targetIndex)
                                 return a.targetIndex < b.targetIndex;
                               return a.permutation < b.permutation;
                             });
  if (it == morphisms.end() || !(*it == probe)) throw Error("morphism not found in the slice");
  return static_cast<int>(it - morphisms.begin());
}

int GroupoidSlice::compose(int h, int g) const {
  const Isomorphism& outer = morphisms[h];
  const Isomorphism& inner = morphisms[g];
  if (inner.targetIndex != outer.sourceIndex)
    throw Error("morphisms are not composable");
  std::vector<int> perm(inner.permutation.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = outer.permutation[inner.permutation[i]];
  return morphismIndex(inner.sourceIndex, outer.targetIndex, perm);
}

std::vector<int> GroupoidSlice::morphismsFrom(int modelIndex) const {
  std::vector<int> out;
  for (size_t i = 0; i < morphisms.size(); ++i)
    if (morphisms[i].sourceIndex == modelIndex) out.push_back(static_cast<int>(i));
  return out;
}

GroupoidSlice buildGroupoidSlice(const Language& language, const Theory& theory, int cap,
                                 long long budget) {
  GroupoidSlice slice;
  slice.language = language;
  slice.theory = theory;
  slice.cap = cap;
  slice.models = enumerateModels(language, theory, cap, budget);

  for (size_t i = 0; i < slice.models.size(); ++i)
    for (size_t j = 0; j < slice.models.size(); ++j) {
      for (Isomorphism& iso : enumerateIsomorphisms(slice.models[i], slice.models[j])) {
        iso.sourceIndex = static_cast<int>(i);
        iso.targetIndex = static_cast<int>(j);
        slice.morphisms.push_back(std::move(iso));
        if (budget > 0 && static_cast<long long>(slice.morphisms.size()) > budget)
          throw BudgetExceeded("cap too large: morphism count exceeded the budget");
      }
    }

  slice.unit.assign(slice.models.size(), -1);
  for (size_t i = 0; i < slice.models.size(); ++i) {
    std::vector<int> id(slice.models[i].size);
    std::iota(id.begin(), id.end(), 0);
    slice.unit[i] = slice.morphismIndex(static_cast<int>(i), static_cast<int>(i), id);
  }
  slice.inverse.assign(slice.morphisms.size(), -1);
  for (size_t g = 0; g < slice.morphisms.size(); ++g) {
    const Isomorphism& iso = slice.morphisms[g];
    std::vector<int> inv(iso.permutation.size());
    for (size_t i = 0; i < iso.permutation.size(); ++i) inv[iso.permutation[i]] = static_cast<int>(i);
    slice.inverse[g] = slice.morphismIndex(iso.targetIndex, iso.sourceIndex, inv);
  }

  // Exhaustive groupoid-axiom verification.
  for (size_t g = 0; g < slice.morphisms.size(); ++g) {
    const Isomorphism& iso = slice.morphisms[g];
    if (slice.compose(slice.unit[iso.targetIndex], static_cast<int>(g)) != static_cast<int>(g))
      throw Error("groupoid axiom violated: left unit");
    if (slice.compose(static_cast<int>(g), slice.unit[iso.sourceIndex]) != static_cast<int>(g))
      throw Error("groupoid axiom violated: right unit");
    if (slice.compose(slice.inverse[g], static_cast<int>(g)) != slice.unit[iso.sourceIndex])
      throw Error("groupoid axiom violated: inverse");
  }
  for (size_t g = 0; g < slice.morphisms.size(); ++g)
    for (size_t h = 0; h < slice.morphisms.size(); ++h) {
      if (slice.morphisms[h].sourceIndex != slice.morphisms[g].targetIndex) continue;
      int hg = slice.compose(static_cast<int>(h), static_cast<int>(g));
      for (size_t k = 0; k < slice.morphisms.size(); ++k) {
        if (slice.morphisms[k].sourceIndex != slice.morphisms[h].targetIndex) continue;
        if (slice.compose(static_cast<int>(k), hg) !=
            slice.compose(slice.compose(static_cast<int>(k), static_cast<int>(h)),
                          static_cast<int>(g)))
          throw Error("groupoid axiom violated: associativity");
      }
    }
  return slice;
}

int FiberedSort::totalPoints() const {
  int total = 0;
  for (const InterpretedSort& f : fibers) total += f.carrier.size;
  return total;
}

FiberedSort buildFiberedSort(const ImaginarySort& sort, const GroupoidSlice& slice) {
  FiberedSort fs;
  fs.slice = &slice;
  fs.sort = sort;
  fs.fibers.resize(slice.models.size());
  parallelFor(slice.models.size(),
              [&](size_t m) { fs.fibers[m] = interpretSortInModel(sort, slice.models[m]); });
  fs.action.resize(slice.morphisms.size());
  parallelFor(slice.morphisms.size(), [&](size_t g) {
    const Isomorphism& iso = slice.morphisms[g];
    fs.action[g] =
        transportAlongIso(fs.fibers[iso.sourceIndex], fs.fibers[iso.targetIndex], iso.permutation);
  });
  return fs;
}

FiberSet FiberSet::empty(const FiberedSort& fs) {
  FiberSet s;
  for (const InterpretedSort& f : fs.fibers) s.bits.emplace_back(f.carrier.size, false);
  return s;
}

FiberSet FiberSet::full(const FiberedSort& fs) {
  FiberSet s;
  for (const InterpretedSort& f : fs.fibers) s.bits.emplace_back(f.carrier.size, true);
  return s;
}

FiberSet FiberSet::unite(const FiberSet& other) const {
  FiberSet s = *this;
  for (size_t m = 0; m < bits.size(); ++m)
    for (size_t e = 0; e < bits[m].size(); ++e) s.bits[m][e] = bits[m][e] || other.bits[m][e];
  return s;
}

FiberSet FiberSet::intersect(const FiberSet& other) const {
  FiberSet s = *this;
  for (size_t m = 0; m < bits.size(); ++m)
    for (size_t e = 0; e < bits[m].size(); ++e) s.bits[m][e] = bits[m][e] && other.bits[m][e];
  return s;
}

FiberSet FiberSet::complement() const {
  FiberSet s = *this;
  for (size_t m = 0; m < bits.size(); ++m)
    for (size_t e = 0; e < bits[m].size(); ++e) s.bits[m][e] = !bits[m][e];
  return s;
}

size_t FiberSet::count() const {
  size_t c = 0;
  for (const auto& row : bits)
    for (bool b : row) c += b;
  return c;
}

bool sameEqualityType(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

std::vector<int> morphismSet(const std::vector<int>& from, const std::vector<int>& to,
                             const GroupoidSlice& slice) {
  if (!sameEqualityType(from, to))
    throw Error("morphismSet: tuples have different equality types");
  std::vector<int> out;
  for (size_t g = 0; g < slice.morphisms.size(); ++g) {
    const Isomorphism& iso = slice.morphisms[g];
    int sourceSize = slice.models[iso.sourceIndex].size;
    int targetSize = slice.models[iso.targetIndex].size;
    bool ok = true;
    for (size_t i = 0; i < from.size() && ok; ++i) {
      if (from[i] >= sourceSize || to[i] >= targetSize) ok = false;
      else if (iso.permutation[from[i]] != to[i]) ok = false;
    }
    if (ok) out.push_back(static_cast<int>(g));
  }
  return out;
}

std::vector<int> allMorphisms(const GroupoidSlice& slice) {
  std::vector<int> out(slice.morphisms.size());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

FiberSet translateSet(const FiberSet& u, const std::vector<int>& w, const FiberedSort& fs) {
  FiberSet out = FiberSet::empty(fs);
  for (int g : w) {
    const Isomorphism& iso = fs.slice->morphisms[g];
    const CodedMap& act = fs.action[g];
    for (int e = 0; e < act.sourceSize; ++e)
      if (u.contains(iso.targetIndex, act.values[e])) out.insert(iso.sourceIndex, e);
  }
  return out;
}

FiberSet vaughtTransform(const FiberSet& b, const std::vector<int>& u, VaughtKind kind,
                         const FiberedSort& fs) {
  std::vector<bool> inU(fs.slice->morphisms.size(), false);
  for (int g : u) inU[g] = true;
  FiberSet out = FiberSet::empty(fs);
  for (size_t m = 0; m < fs.fibers.size(); ++m) {
    std::vector<int> fiber;
    for (size_t g = 0; g < fs.slice->morphisms.size(); ++g)
      if (inU[g] && fs.slice->morphisms[g].sourceIndex == static_cast<int>(m))
        fiber.push_back(static_cast<int>(g));
    for (int e = 0; e < fs.fibers[m].carrier.size; ++e) {
      bool any = false;
      bool all = true;
      for (int g : fiber) {
        bool hit = b.contains(fs.slice->morphisms[g].targetIndex, fs.action[g].values[e]);
        any = any || hit;
        all = all && hit;
      }
      bool value = false;
      switch (kind) {
        case VaughtKind::Exist: value = any; break;
        case VaughtKind::All: value = all; break;  // vacuously true on empty fibers
        case VaughtKind::AllNonempty: value = all && !fiber.empty(); break;
      }
      if (value) out.bits[m][e] = true;
    }
  }
  return out;
}

std::vector<int> composeMorphismSets(const std::vector<int>& u, const std::vector<int>& v,
                                     const GroupoidSlice& slice) {
  std::set<int> out;
  for (int g : u)
    for (int h : v)
      if (slice.morphisms[h].targetIndex == slice.morphisms[g].sourceIndex)
        out.insert(slice.compose(g, h));
  return std::vector<int>(out.begin(), out.end());
}

} // namespace ilwb
