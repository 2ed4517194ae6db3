#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ilwb/errors.hpp"

namespace ilwb {

class Formula;

enum class FormulaKind {
  Atom,    // R(x_{i0}, ..., x_{ia-1})
  Eq,      // x_i = x_j (stored with i <= j)
  True,
  False,
  And,     // finite conjunction; empty sequences collapse to True at construction
  Or,      // finite disjunction; empty sequences collapse to False at construction
  Not,
  Exists,  // binds the top context index of its body
  Forall,  // likewise
};

// Formulas-in-context with positional variables 0..contextSize-1.  Binders
// extend the context by one slot at the top, so renaming-equivalent formulas
// are structurally identical.  Nodes are immutable and shared; copying a
// Formula is cheap.
class Formula {
public:
  struct Node;

  Formula() = default;   // null handle; only assignment is valid on it

  static Formula atom(std::string relation, std::vector<int> args, int contextSize);
  static Formula eq(int i, int j, int contextSize);
  static Formula top(int contextSize);
  static Formula bottom(int contextSize);
  static Formula conj(int contextSize, std::vector<Formula> parts);
  static Formula disj(int contextSize, std::vector<Formula> parts);
  static Formula negation(Formula part);
  static Formula exists(Formula body);   // body context n+1 -> formula context n
  static Formula forall(Formula body);
  static Formula existsMany(int count, Formula body);
  static Formula forallMany(int count, Formula body);

  bool valid() const { return node_ != nullptr; }
  int contextSize() const;
  FormulaKind kind() const;
  const std::string& relation() const;        // Atom
  const std::vector<int>& args() const;       // Atom indices / Eq pair
  const std::vector<Formula>& parts() const;  // And/Or members, single child otherwise
  const Formula& child() const;               // Not/Exists/Forall

  size_t hash() const;
  // Stable node identity for memoization (shared subtrees compare equal).
  const void* id() const { return node_.get(); }

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }
  // Total structural order; used for canonical sets and deterministic output.
  bool operator<(const Formula& other) const;

  int depth() const;

private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const { return f.hash(); }
};

struct RelationSymbol {
  std::string name;
  int arity = 0;
  bool operator==(const RelationSymbol& other) const = default;
};

// A finite relational language.  Relation order is declaration order; it
// fixes file formats, model-table order, and enumeration order downstream.
struct Language {
  std::vector<RelationSymbol> relations;
  // Coherent formula with two variables standing for x != y, when the
  // theory is decidable.
  std::optional<Formula> decidabilityWitness;

  const RelationSymbol* find(const std::string& name) const;
  int indexOf(const std::string& name) const;  // -1 when absent
};

struct CoherentAxiom {
  int contextSize = 0;
  Formula lhs;
  Formula rhs;
};

struct Theory {
  Language language;
  std::vector<CoherentAxiom> coherentAxioms;
  std::vector<Formula> sentences;  // closed, arbitrary L_omega1omega
};

// A finite formula set closed under subformulas, the recorded on-demand
// companions (negated conjuncts, the not-exists-not partner of forall), and
// containing all atomic formulas up to the largest context present.
struct Fragment {
  std::set<Formula> formulas;
  int maxContext = 0;

  bool contains(const Formula& f) const { return formulas.count(f) > 0; }
};

// ---- operations ----

bool isCoherent(const Formula& f);

// Reindexing along map (old index -> new index); map.size() must equal the
// old context size and every image must be < newContextSize.
Formula substituteVariables(const Formula& f, const std::vector<int>& map, int newContextSize);

// Sharing-preserving substitution: identical (node, map) pairs return the
// same node, so reindexed copies of a formula DAG stay a DAG and evaluation
// caches keyed on node identity keep working.  Sources are kept alive by the
// cache.
class SubstitutionCache {
public:
  Formula apply(const Formula& f, const std::vector<int>& map, int newContextSize);

private:
  std::map<std::tuple<const void*, std::vector<int>, int>, std::pair<Formula, Formula>> memo_;
};

// Disjunction of existentially-quantified conjunctions of atomic/equality
// literals, semantically equal to the coherent input.
Formula coherentNormalForm(const Formula& f);

Fragment fragmentClose(const std::vector<Formula>& seed, const Language& language);

// The closed-sentence form of a coherent axiom: forall^n (not lhs \/ rhs).
Formula axiomSentence(const CoherentAxiom& axiom);

// ---- printing / parsing ----

// Names for context slots 0,1,2,...: x y z w u v s t then x8, x9, ...
std::string variableName(int index);
std::vector<std::string> defaultNames(int contextSize);

std::string printFormula(const Formula& f, const std::vector<std::string>& names);
std::string printFormula(const Formula& f);  // default names
std::string printTheory(const Theory& theory);

// Parses a formula against a fixed free-variable context (name -> index).
Formula parseFormula(const std::string& text, const std::vector<std::string>& context,
                     const Language& language);
std::pair<Language, Theory> parseTheory(const std::string& text);

// x != y expanded through the language's decidability witness at the given
// context; throws Error when the witness is absent and one is required.
Formula inequality(const Language& language, int i, int j, int contextSize);

uint64_t fnv1a64(const std::string& text);

} // namespace ilwb
