#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ilwb/semantics.hpp"
#include "ilwb/syntax.hpp"

namespace ilwb {

// Whether non-coherent formulas (negation, universal quantification) are
// admitted in sorts, relations, and translations.
enum class LogicMode { Coherent, Boolean };

// A formal countable (here: finite) disjoint union of definable sets
// quotiented by a definable equivalence relation.  pieces[i] has context
// arity(i); relations[i][j] has context arity(i)+arity(j).
struct ImaginarySort {
  std::vector<Formula> pieces;
  std::vector<std::vector<Formula>> relations;

  int pieceCount() const { return static_cast<int>(pieces.size()); }
  int arity(int piece) const { return pieces[piece].contextSize(); }
  bool operator==(const ImaginarySort& other) const;
};

// A subsort: per-piece formulas implying the sort's pieces and invariant
// under its equivalence relation.
struct DefinableRelation {
  ImaginarySort sort;
  std::vector<Formula> pieces;
};

// A family of graph formulas interpreting as a function A^M -> B^M in every
// model.  graph[i][k] has context source.arity(i) + target.arity(k).
struct DefinableFunction {
  ImaginarySort source;
  ImaginarySort target;
  std::vector<std::vector<Formula>> graph;
};

struct ValidationWitness {
  std::string clause;          // which schema condition failed
  int modelIndex = -1;         // index into the validation slice
  FiniteModel model;
  std::vector<int> tuple;      // offending raw tuple (concatenated blocks)
  std::vector<int> pieceIndices;
};

struct ValidationReport {
  bool valid = true;
  std::optional<ValidationWitness> witness;
};

ValidationReport validateSort(const ImaginarySort& sort, const Language& language,
                              const Theory& theory, int cap);
ValidationReport validateRelation(const DefinableRelation& relation, const Language& language,
                                  const Theory& theory, int cap);
ValidationReport validateFunction(const DefinableFunction& fn, const Language& language,
                                  const Theory& theory, int cap);

// Single formula quotiented by equality.
ImaginarySort sortFromFormula(const Formula& alpha);
// Finitely many formulas, disjointly, quotiented by equality.
ImaginarySort sortFromFormulas(const std::vector<Formula>& alphas);
// The home sort X: true formula in one variable.
ImaginarySort homeSort();
// X^n as a single-piece sort.
ImaginarySort homePowerSort(int n);
// Subsort packaged as a sort of its own: pieces beta_i, relations
// beta_i /\ beta_j /\ eps_ij.
ImaginarySort relationAsSort(const DefinableRelation& relation);

DefinableFunction identityFunction(const ImaginarySort& sort);
DefinableFunction composeFunctions(const DefinableFunction& g, const DefinableFunction& f);

struct ProductSort {
  ImaginarySort sort;          // pieces indexed (i,k) row-major: i*|B|+k
  DefinableFunction left;      // projection onto A
  DefinableFunction right;     // projection onto B
};
ProductSort productSort(const ImaginarySort& a, const ImaginarySort& b);

// n-fold power of a sort; pieces indexed by mixed-radix row-major tuples
// over the piece indices.
ImaginarySort powerSort(const ImaginarySort& a, int n);
std::vector<int> powerPieceIndex(const ImaginarySort& a, int n, int flatIndex);
int powerPieceFlat(const ImaginarySort& a, int n, const std::vector<int>& indices);

DefinableRelation equalizerSort(const DefinableFunction& f, const DefinableFunction& g);

enum class SubobjectOp { Meet, Join, Complement, ExistsImage };

Formula subobjectOp(SubobjectOp op, const std::vector<Formula>& operands,
                    LogicMode mode = LogicMode::Coherent);
DefinableRelation subobjectOp(SubobjectOp op, const std::vector<DefinableRelation>& operands,
                              LogicMode mode = LogicMode::Coherent);

} // namespace ilwb
