#pragma once

#include <optional>
#include <set>
#include <vector>

#include "ilwb/coding.hpp"
#include "ilwb/groupoid.hpp"
#include "ilwb/pretopos.hpp"

namespace ilwb {

// A model of the source theory inside the target theory's imaginary-sort
// calculus: a home-sort image plus a definable relation on each of its powers
// for the source relations, in source declaration order.
struct Interpretation {
  Language sourceLanguage;
  Theory sourceTheory;
  Language targetLanguage;
  Theory targetTheory;
  ImaginarySort homSortImage;
  std::vector<DefinableRelation> relationImages;  // on powerSort(homSortImage, arity)
  LogicMode mode = LogicMode::Coherent;
};

Interpretation identityInterpretation(const Language& language, const Theory& theory);

// F(phi): the definable relation on powerSort(F.homSortImage, phi.context)
// obtained by structural induction through the pretopos operations.
DefinableRelation translateFormulaAlong(const Interpretation& interp, const Formula& phi);

// The relation's fiber as a set of class tuples of the hom-sort carrier.
std::set<std::vector<int>> interpretRelationClasses(const DefinableRelation& relation,
                                                    const ImaginarySort& homSort,
                                                    const InterpretedSort& fiber);

struct InterpretationCheck {
  std::string what;       // which axiom or structural condition
  bool holds = true;
  int modelIndex = -1;
  std::vector<int> witness;  // class tuple violating an inclusion
};

struct InterpretationReport {
  bool valid = true;
  std::vector<InterpretationCheck> checks;
  std::optional<ValidationWitness> sortWitness;
};

InterpretationReport validateInterpretation(const Interpretation& interp, int cap);

// F^* on objects: the transported model on the canonical carrier.
FiniteModel applyToModel(const Interpretation& interp, const FiniteModel& targetModel);
// F^* on morphisms: the transported permutation.
std::vector<int> applyToIso(const Interpretation& interp, const FiniteModel& source,
                            const FiniteModel& target, const std::vector<int>& permutation);

struct ComposedInterpretation {
  Interpretation interpretation;
  // Per target model (enumeration order at the validation cap): the carrier
  // bijection from applyToModel(composite, M) to
  // applyToModel(F, applyToModel(G, M)), verified to be an isomorphism of
  // source-language structures.
  std::vector<CodedMap> zeta;
  std::vector<FiniteModel> targetModels;
};

// g after f: F interprets (L,T) in (L',T'), G interprets (L',T') in (L'',T'').
ComposedInterpretation composeInterpretations(const Interpretation& g, const Interpretation& f,
                                              int cap);

struct SequenceSortEmbedding {
  std::vector<int> paddedArities;  // strictly increasing
  ImaginarySort embedded;          // subsort-of-sequence-sort presentation
};

// Diagonal padding of the pieces to strictly increasing arities.
SequenceSortEmbedding sequenceSortEmbedding(const ImaginarySort& sort);
CodedMap sequenceEmbeddingBijection(const ImaginarySort& sort, const SequenceSortEmbedding& emb,
                                    const FiniteModel& model);

struct HMMData {
  std::vector<Formula> domainPieces;                     // strictly increasing contexts
  std::vector<std::vector<Formula>> domainEquivalence;   // matrix over the pieces
  std::vector<std::vector<std::vector<Formula>>> relationImages;  // per source relation
};

Interpretation fromHMMData(const HMMData& data, const Language& sourceLanguage,
                           const Theory& sourceTheory, const Language& targetLanguage,
                           const Theory& targetTheory, int cap);

// Desk-scale falsifier for essential surjectivity: a functor given as a table
// on the slice, searched against bounded interpretation candidates.
struct FunctorTable {
  std::vector<FiniteModel> objectImages;            // per slice model
  std::vector<std::vector<int>> morphismImages;     // per slice morphism
};

struct SearchOptions {
  int maxFormulaDepth = 2;
  int maxHomContext = 1;
  long long maxCandidates = 100000;
};

struct SearchResult {
  bool found = false;
  long long candidatesTried = 0;
  std::optional<Interpretation> interpretation;
};

SearchResult searchInterpretation(const FunctorTable& table, const Language& sourceLanguage,
                                  const Theory& sourceTheory, const GroupoidSlice& targetSlice,
                                  const SearchOptions& options);

} // namespace ilwb
