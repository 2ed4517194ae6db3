#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ilwb/syntax.hpp"

namespace ilwb {

// Set of n-tuples over {0,...,universe-1}, stored as a bitmap indexed by
// lexicographic tuple rank.
class TupleSet {
public:
  TupleSet() = default;
  TupleSet(int arity, int universe, bool full = false);

  int arity() const { return arity_; }
  int universe() const { return universe_; }
  size_t capacity() const { return bits_.size(); }

  bool contains(const std::vector<int>& tuple) const;
  void insert(const std::vector<int>& tuple);
  size_t count() const;
  bool empty() const { return count() == 0; }

  TupleSet intersect(const TupleSet& other) const;
  TupleSet unite(const TupleSet& other) const;
  TupleSet complement() const;
  bool subsetOf(const TupleSet& other) const;
  bool operator==(const TupleSet& other) const;

  std::vector<std::vector<int>> tuples() const;  // lexicographic order
  // Lexicographically least tuple in this \ other, when any.
  std::optional<std::vector<int>> firstNotIn(const TupleSet& other) const;

  static size_t rank(const std::vector<int>& tuple, int universe);
  std::vector<int> unrank(size_t index) const;

  bool bit(size_t index) const { return bits_[index]; }
  void setBit(size_t index, bool value) { bits_[index] = value; }

private:
  int arity_ = 0;
  int universe_ = 0;
  std::vector<bool> bits_;
};

// Relational structure on the initial segment {0,...,size-1} of N.  Tables
// follow the language's declaration order; tuples are kept sorted.
struct FiniteModel {
  struct Table {
    std::string relation;
    int arity = 0;
    std::vector<std::vector<int>> tuples;  // sorted, deduplicated
  };

  int size = 0;
  std::vector<Table> tables;

  const Table* find(const std::string& relation) const;
  Table* find(const std::string& relation);
  bool has(const std::string& relation, const std::vector<int>& tuple) const;
  void normalize();  // sort + dedup all tables

  bool operator==(const FiniteModel& other) const;
  bool operator<(const FiniteModel& other) const;

  static FiniteModel empty(const Language& language, int size);
};

struct AxiomVerdict {
  bool holds = true;
  std::optional<std::vector<int>> counterexample;  // lexicographically least
};

struct TheoryReport {
  std::vector<AxiomVerdict> axiomVerdicts;     // aligned with theory.coherentAxioms
  std::vector<AxiomVerdict> sentenceVerdicts;  // aligned with theory.sentences
  bool allHold() const;
};

// Per-(node,model) evaluation cache; reusable across calls for formulas that
// share subtrees.  Keyed by node identity, so it must only ever see one model.
using EvalCache = std::map<const void*, TupleSet>;

TupleSet evalFormula(const Formula& f, const FiniteModel& model, EvalCache* cache = nullptr);

AxiomVerdict satisfiesAxiom(const FiniteModel& model, const CoherentAxiom& axiom);
AxiomVerdict satisfiesAxiom(const FiniteModel& model, const Formula& sentence);
TheoryReport satisfiesTheory(const FiniteModel& model, const Theory& theory);

// All models of the theory with size <= cap, ordered by size then by the
// lexicographic order of the concatenated relation bitmaps.  `budget`, when
// positive, bounds the number of candidate tables examined.
std::vector<FiniteModel> enumerateModels(const Language& language, const Theory& theory, int cap,
                                         long long budget = 0);

// Agreement of the two formulas on every model of the theory up to the cap.
// Cap-relative only; nothing is claimed beyond it.
bool semanticallyEquivalent(const Formula& phi, const Formula& psi, const Language& language,
                            const Theory& theory, int cap);

} // namespace ilwb
