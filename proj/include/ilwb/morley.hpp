#pragma once

#include <map>
#include <string>
#include <vector>

#include "ilwb/semantics.hpp"
#include "ilwb/syntax.hpp"

namespace ilwb {

// Morleyization of a fragment-theory: one fresh relation per fragment member,
// the schema axioms tying them together, and the source axioms carried over
// through their fresh relations.  The source relations stay in the target
// language, tied by the atomic biconditionals.
struct MorleyResult {
  Language sourceLanguage;
  Theory sourceTheory;
  Fragment fragment;
  Language targetLanguage;
  Theory targetTheory;
  // Canonically ordered (formula -> fresh relation) table.
  std::map<Formula, RelationSymbol> formulaIndex;

  const RelationSymbol& relationFor(const Formula& f) const;
  // R_phi applied to the identity tuple of phi's context.
  Formula freshAtom(const Formula& f) const;
};

MorleyResult morleyize(const Language& language, const Theory& theory, const Fragment& fragment);

// The unique expansion: R_phi tables are the evaluations of phi in the model.
FiniteModel expandModel(const FiniteModel& model, const MorleyResult& result);
FiniteModel reductModel(const FiniteModel& expanded, const Language& language);

// \/_i R_{phi_i}(x...) for fragment formulas phi_i sharing a context.
Formula translateFragmentDisjunction(const std::vector<Formula>& disjuncts,
                                     const MorleyResult& result);

} // namespace ilwb
