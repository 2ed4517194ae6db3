#pragma once

#include <map>
#include <memory>
#include <vector>

#include "ilwb/groupoid.hpp"
#include "ilwb/syntax.hpp"

namespace ilwb {

// A basic open of the fibered set over X^n: the section at the tuple
// `section` intersected with the preimage of the basic set [[guard(args)]],
// where guard is a finite conjunction of atomic relations.
struct BasicOpen {
  int pointArity = 0;          // n
  std::vector<int> section;    // length n
  Formula guard;               // basic formula (conjunction of atoms / true)
  std::vector<int> guardArgs;  // length = guard context

  static BasicOpen wholeSpace(int pointArity);
};

bool isBasicFormula(const Formula& f);

// A Borel set over [[X^n]] built from basic opens by finite unions and
// complements.
struct BorelDescriptor {
  enum class Kind { Leaf, Union, Complement };
  using Ptr = std::shared_ptr<const BorelDescriptor>;

  Kind kind = Kind::Leaf;
  BasicOpen leaf;
  std::vector<Ptr> children;

  static Ptr mkLeaf(BasicOpen open);
  static Ptr mkUnion(std::vector<Ptr> children, int pointArity);
  static Ptr mkComplement(Ptr child);
  int pointArity() const;
};

// Point sets of [[X^n]] over a slice: (modelIndex, tuple rank) membership.
// Uses the canonical identification of the X^n fiber with lexicographically
// ranked n-tuples.
FiberSet evalBasicOpen(const BasicOpen& open, const FiberedSort& xn);
FiberSet evalDescriptor(const BorelDescriptor::Ptr& d, const FiberedSort& xn);

// ---- abbreviation formulas ----
// All of these expand x != y through the language's decidability witness and
// report its absence as an error.

Formula sizeAtLeast(const Language& language, int n);
Formula tupleInModel(const Language& language, const std::vector<int>& tuple);
Formula equalityType(const Language& language, const std::vector<int>& tuple);
Formula orbitContains(const Language& language, const std::vector<int>& tuple);

// ---- synthesis ----

// Memoizing synthesizer for translate formulas over one decidable language.
class Synthesizer {
public:
  Synthesizer(const Language& language, int capN) : language_(language), capN_(capN) {}

  // Formula phi with |base|+n variables such that on any slice of cap <= capN,
  // [[a -> base]]^{-1} . U = [[phi(a, -)]] for every a with the equality type
  // of base.
  Formula openTranslate(const BasicOpen& open, const std::vector<int>& base);

  // Same contract with the existential Vaught transform in place of the
  // translate; general (non-coherent) formulas may be produced.
  Formula borelTranslate(const BorelDescriptor::Ptr& d, const std::vector<int>& base);

private:
  Formula orbitFormula(const std::vector<int>& tuple);

  const Language& language_;
  int capN_;
  // The keys own their nodes so a freed descriptor's address can never be
  // reused while a memo entry still refers to it.
  std::map<std::pair<BorelDescriptor::Ptr, std::vector<int>>, Formula> memo_;
  std::map<std::vector<int>, Formula> orbitMemo_;
  SubstitutionCache subst_;
};

Formula synthesizeOpenTranslate(const BasicOpen& open, const std::vector<int>& base,
                                const Language& language, int capN);
Formula synthesizeBorelTranslate(const BorelDescriptor::Ptr& d, const std::vector<int>& base,
                                 const Language& language, int capN);

struct InvarianceFailure {
  int morphism = -1;
  int modelIndex = -1;
  int element = -1;
};

// Verifies the union of the given basic opens is invariant on the slice and
// synthesizes a coherent formula defining it; throws Error with the moving
// witness otherwise.
Formula synthesizeInvariantOpen(const std::vector<BasicOpen>& opens, const FiberedSort& xn,
                                const Language& language);

Formula synthesizeInvariantBorel(const BorelDescriptor::Ptr& d, const FiberedSort& xn,
                                 const Language& language, int capN);

// Expresses arbitrary point sets of [[X^n]] over the slice as Borel
// descriptors, using separating basic opens built from the given probe
// relations (defaults to the whole language).  Descriptors produced by one
// separator share their leaf nodes, so a synthesizer memoizes across them.
class PointSetSeparator {
public:
  PointSetSeparator(const FiberedSort& xn, int pointArity,
                    const std::vector<std::string>& probeRelations = {});

  BorelDescriptor::Ptr descriptorFor(const FiberSet& points) const;

private:
  const FiberedSort& xn_;
  int pointArity_;
  std::vector<BorelDescriptor::Ptr> generators_;
  std::vector<BorelDescriptor::Ptr> complemented_;
  std::vector<FiberSet> generatorSets_;
};

BorelDescriptor::Ptr descriptorForPointSet(const FiberSet& points, const FiberedSort& xn,
                                           int pointArity,
                                           const std::vector<std::string>& probeRelations = {});

// The set [[phi(a, -)]] over the slice: models where evaluating phi with its
// first |a| coordinates fixed to a yields the remaining-point tuple.  The
// optional caches (one per slice model) make repeated evaluations of
// formulas with shared subtrees cheap.
FiberSet evalFormulaSection(const Formula& phi, const std::vector<int>& prefix,
                            const FiberedSort& xn, std::vector<EvalCache>* caches = nullptr);

} // namespace ilwb
