#pragma once

#include <optional>
#include <set>
#include <vector>

#include "ilwb/coding.hpp"
#include "ilwb/pretopos.hpp"
#include "ilwb/semantics.hpp"

namespace ilwb {

// An isomorphism between two finite models of equal size, as the permutation
// carrying the source's tables onto the target's.
struct Isomorphism {
  int sourceIndex = -1;  // indices into the owning slice's model list
  int targetIndex = -1;
  std::vector<int> permutation;

  bool operator==(const Isomorphism&) const = default;
};

// All models of a theory up to a size cap together with every isomorphism
// between them and the groupoid structure maps, verified to satisfy the
// groupoid axioms exactly.
struct GroupoidSlice {
  Language language;
  Theory theory;
  int cap = 0;
  std::vector<FiniteModel> models;
  std::vector<Isomorphism> morphisms;  // ordered by (source, target, permutation)
  std::vector<int> unit;               // model index -> identity morphism index
  std::vector<int> inverse;            // morphism index -> inverse index

  int morphismIndex(int sourceIndex, int targetIndex, const std::vector<int>& permutation) const;
  // h after g, for composable g, h (target of g = source of h).
  int compose(int h, int g) const;
  std::vector<int> morphismsFrom(int modelIndex) const;
};

GroupoidSlice buildGroupoidSlice(const Language& language, const Theory& theory, int cap,
                                 long long budget = 1000000);

std::vector<Isomorphism> enumerateIsomorphisms(const FiniteModel& source,
                                               const FiniteModel& target);

// The interpretation functor restricted to the slice: per-model fibers plus
// the transport bijection along every morphism.
struct FiberedSort {
  const GroupoidSlice* slice = nullptr;
  ImaginarySort sort;
  std::vector<InterpretedSort> fibers;  // per model
  std::vector<CodedMap> action;         // per morphism

  int totalPoints() const;
};

FiberedSort buildFiberedSort(const ImaginarySort& sort, const GroupoidSlice& slice);

// A subset of a fibered sort, as per-model membership bitmaps.
struct FiberSet {
  std::vector<std::vector<bool>> bits;  // bits[modelIndex][element]

  static FiberSet empty(const FiberedSort& fs);
  static FiberSet full(const FiberedSort& fs);
  bool contains(int modelIndex, int element) const { return bits[modelIndex][element]; }
  void insert(int modelIndex, int element) { bits[modelIndex][element] = true; }
  FiberSet unite(const FiberSet& other) const;
  FiberSet intersect(const FiberSet& other) const;
  FiberSet complement() const;
  bool operator==(const FiberSet&) const = default;
  size_t count() const;
};

// Morphism sets [[a -> b]]: all morphisms carrying the tuple a to b.  The
// tuples must share an equality type.
std::vector<int> morphismSet(const std::vector<int>& from, const std::vector<int>& to,
                             const GroupoidSlice& slice);
std::vector<int> allMorphisms(const GroupoidSlice& slice);

bool sameEqualityType(const std::vector<int>& a, const std::vector<int>& b);

// W^{-1} . U = { x : exists g in W with g . x in U }.
FiberSet translateSet(const FiberSet& u, const std::vector<int>& w, const FiberedSort& fs);

enum class VaughtKind { Exist, All, AllNonempty };

// Finite Vaught transforms: the Baire category quantifiers degenerate to
// plain quantifiers over the morphism fiber from each point's model.
FiberSet vaughtTransform(const FiberSet& b, const std::vector<int>& u, VaughtKind kind,
                         const FiberedSort& fs);

// U . V = { g . h : g in U, h in V, source(g) = target(h) }.
std::vector<int> composeMorphismSets(const std::vector<int>& u, const std::vector<int>& v,
                                     const GroupoidSlice& slice);

} // namespace ilwb
