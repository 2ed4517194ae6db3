#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ilwb/pretopos.hpp"
#include "ilwb/semantics.hpp"

namespace ilwb {

// An initial segment {0,...,size-1} of N.
struct CodedSet {
  int size = 0;
  bool operator==(const CodedSet&) const = default;
};

struct CodedMap {
  int sourceSize = 0;
  int targetSize = 0;
  std::vector<int> values;  // values[i] < targetSize, one per source element

  int operator()(int x) const { return values.at(x); }
  bool operator==(const CodedMap&) const = default;

  static CodedMap identity(int size);
  static CodedMap compose(const CodedMap& outer, const CodedMap& inner);
  bool isBijection() const;
  CodedMap inverse() const;
};

// ---- canonical codings of the pretopos operations ----
// All numberings are by least representative / lexicographic order; products
// pair lexicographically.  Identical inputs give identical outputs.

struct ProductCoding {
  CodedSet product;
  CodedMap first;   // product -> M
  CodedMap second;  // product -> N
};
ProductCoding codeProduct(CodedSet m, CodedSet n);

struct InjectionCoding {
  CodedSet subset;
  CodedMap include;  // subset -> ambient, order-preserving
};
InjectionCoding codeEqualizer(const CodedMap& f, const CodedMap& g);

struct PullbackCoding {
  CodedSet pullback;
  CodedMap first;
  CodedMap second;
};
PullbackCoding codePullback(const CodedMap& f, const CodedMap& g);

struct DisjointUnionCoding {
  CodedSet total;
  std::vector<CodedMap> injections;
};
DisjointUnionCoding codeDisjointUnion(const std::vector<CodedSet>& parts);

struct QuotientCoding {
  CodedSet quotient;
  CodedMap projection;  // N -> quotient, classes numbered by least element
};
// p, q: M -> N with (p, q) injective and image an equivalence relation on N.
QuotientCoding codeQuotient(const CodedMap& p, const CodedMap& q);
// Convenience: quotient of {0..size-1} by the reflexive-symmetric-transitive
// closure of the generator pairs.
QuotientCoding codeQuotientByPairs(int size, const std::vector<std::pair<int, int>>& pairs);

struct ImageCoding {
  CodedSet image;
  CodedMap surjection;  // M -> image
  CodedMap injection;   // image -> N; injection o surjection = f
};
// Image numbered by least preimage order (order of first occurrence in f).
ImageCoding codeImageFactorization(const CodedMap& f);

InjectionCoding codeUnionOfInjections(CodedSet ambient, const std::vector<CodedMap>& injections);
InjectionCoding codeComplementOfInjection(const CodedMap& f);

// ---- interpretation of sorts and functions in a single model ----

// A^M: the quotient of the disjoint union of the evaluated pieces by the
// evaluated equivalence relation.  Elements are (pieceIndex, tuple); classes
// are numbered by their least representative in (piece, lexicographic tuple)
// order.
struct InterpretedSort {
  FiniteModel model;
  CodedSet carrier;
  std::map<std::pair<int, std::vector<int>>, int> classOf;
  std::vector<std::pair<int, std::vector<int>>> representatives;  // per class

  int classIndex(int piece, const std::vector<int>& tuple) const;
};

InterpretedSort interpretSortInModel(const ImaginarySort& sort, const FiniteModel& model);

CodedMap interpretFunctionInModel(const DefinableFunction& fn, const FiniteModel& model);
CodedMap interpretFunctionInModel(const DefinableFunction& fn, const InterpretedSort& source,
                                  const InterpretedSort& target);

// The action of an isomorphism g : M ~ N on interpreted sorts: apply g
// coordinatewise to any representative and re-resolve the class in N.
CodedMap transportAlongIso(const ImaginarySort& sort, const FiniteModel& source,
                           const FiniteModel& target, const std::vector<int>& permutation);
CodedMap transportAlongIso(const InterpretedSort& from, const InterpretedSort& to,
                           const std::vector<int>& permutation);

// Cap-relative sort isomorphism: for each isomorphism class of models up to
// the cap, the automorphism actions on the two fibers admit an equivariant
// bijection.  Provided as an explicit check only.
bool sortsIsomorphicAtCap(const ImaginarySort& a, const ImaginarySort& b, const Language& language,
                          const Theory& theory, int cap);

} // namespace ilwb
