#include "ilwb/semantics.hpp"

#include <algorithm>
#include <cmath>

#include "ilwb/errors.hpp"

namespace ilwb {

namespace {

size_t powSize(int base, int exp) {
  size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<size_t>(base);
  return r;
}

} // namespace

TupleSet::TupleSet(int arity, int universe, bool full)
    : arity_(arity), universe_(universe),
      bits_(universe == 0 && arity > 0 ? 0 : powSize(universe, arity), full) {}

size_t TupleSet::rank(const std::vector<int>& tuple, int universe) {
  size_t r = 0;
  for (int v : tuple) r = r * static_cast<size_t>(universe) + static_cast<size_t>(v);
  return r;
}

std::vector<int> TupleSet::unrank(size_t index) const {
  std::vector<int> tuple(arity_, 0);
  for (int i = arity_ - 1; i >= 0; --i) {
    tuple[i] = static_cast<int>(index % universe_);
    index /= universe_;
  }
  return tuple;
}

bool TupleSet::contains(const std::vector<int>& tuple) const {
  return bits_[rank(tuple, universe_)];
}

void TupleSet::insert(const std::vector<int>& tuple) { bits_[rank(tuple, universe_)] = true; }

size_t TupleSet::count() const {
  size_t c = 0;
  for (bool b : bits_) c += b;
  return c;
}

TupleSet TupleSet::intersect(const TupleSet& other) const {
  TupleSet out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] && other.bits_[i];
  return out;
}

TupleSet TupleSet::unite(const TupleSet& other) const {
  TupleSet out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] || other.bits_[i];
  return out;
}

TupleSet TupleSet::complement() const {
  TupleSet out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = !bits_[i];
  return out;
}

bool TupleSet::subsetOf(const TupleSet& other) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

bool TupleSet::operator==(const TupleSet& other) const {
  return arity_ == other.arity_ && universe_ == other.universe_ && bits_ == other.bits_;
}

std::vector<std::vector<int>> TupleSet::tuples() const {
  std::vector<std::vector<int>> out;
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(unrank(i));
  return out;
}

std::optional<std::vector<int>> TupleSet::firstNotIn(const TupleSet& other) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return unrank(i);
  return std::nullopt;
}

const FiniteModel::Table* FiniteModel::find(const std::string& relation) const {
  for (const Table& t : tables)
    if (t.relation == relation) return &t;
  return nullptr;
}

FiniteModel::Table* FiniteModel::find(const std::string& relation) {
  for (Table& t : tables)
    if (t.relation == relation) return &t;
  return nullptr;
}

bool FiniteModel::has(const std::string& relation, const std::vector<int>& tuple) const {
  const Table* t = find(relation);
  if (!t) throw LanguageMismatch("model has no relation " + relation);
  return std::binary_search(t->tuples.begin(), t->tuples.end(), tuple);
}

void FiniteModel::normalize() {
  for (Table& t : tables) {
    std::sort(t.tuples.begin(), t.tuples.end());
    t.tuples.erase(std::unique(t.tuples.begin(), t.tuples.end()), t.tuples.end());
  }
}

bool FiniteModel::operator==(const FiniteModel& other) const {
  if (size != other.size || tables.size() != other.tables.size()) return false;
  for (size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].relation != other.tables[i].relation) return false;
    if (tables[i].tuples != other.tables[i].tuples) return false;
  }
  return true;
}

bool FiniteModel::operator<(const FiniteModel& other) const {
  if (size != other.size) return size < other.size;
  for (size_t i = 0; i < std::min(tables.size(), other.tables.size()); ++i) {
    if (tables[i].tuples != other.tables[i].tuples)
      return tables[i].tuples < other.tables[i].tuples;
  }
  return tables.size() < other.tables.size();
}

FiniteModel FiniteModel::empty(const Language& language, int size) {
  FiniteModel m;
  m.size = size;
  for (const RelationSymbol& r : language.relations) m.tables.push_back({r.name, r.arity, {}});
  return m;
}

namespace {

TupleSet evalNode(const Formula& f, const FiniteModel& model, EvalCache* cache) {
  if (cache) {
    auto it = cache->find(f.id());
    if (it != cache->end()) return it->second;
  }
  const int n = f.contextSize();
  const int k = model.size;
  TupleSet result(n, k);
  switch (f.kind()) {
    case FormulaKind::Atom: {
      const FiniteModel::Table* table = model.find(f.relation());
      if (!table) throw LanguageMismatch("model has no relation " + f.relation());
      if (table->arity != static_cast<int>(f.args().size()))
        throw LanguageMismatch("arity mismatch for relation " + f.relation());
      size_t total = result.capacity();
      std::vector<int> tuple(n, 0);
      std::vector<int> projected(f.args().size(), 0);
      for (size_t idx = 0; idx < total; ++idx) {
        for (size_t a = 0; a < f.args().size(); ++a) projected[a] = tuple[f.args()[a]];
        if (std::binary_search(table->tuples.begin(), table->tuples.end(), projected))
          result.setBit(idx, true);
        for (int pos = n - 1; pos >= 0; --pos) {
          if (++tuple[pos] < k) break;
          tuple[pos] = 0;
        }
      }
      break;
    }
    case FormulaKind::Eq: {
      size_t total = result.capacity();
      std::vector<int> tuple(n, 0);
      const int i = f.args()[0], j = f.args()[1];
      for (size_t idx = 0; idx < total; ++idx) {
        if (tuple[i] == tuple[j]) result.setBit(idx, true);
        for (int pos = n - 1; pos >= 0; --pos) {
          if (++tuple[pos] < k) break;
          tuple[pos] = 0;
        }
      }
      break;
    }
    case FormulaKind::True:
      result = TupleSet(n, k, true);
      break;
    case FormulaKind::False:
      break;
    case FormulaKind::And: {
      result = TupleSet(n, k, true);
      for (const Formula& p : f.parts()) result = result.intersect(evalNode(p, model, cache));
      break;
    }
    case FormulaKind::Or: {
      for (const Formula& p : f.parts()) result = result.unite(evalNode(p, model, cache));
      break;
    }
    case FormulaKind::Not:
      result = evalNode(f.child(), model, cache).complement();
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      TupleSet body = evalNode(f.child(), model, cache);
      bool universal = f.kind() == FormulaKind::Forall;
      size_t total = result.capacity();
      for (size_t idx = 0; idx < total; ++idx) {
        bool value = universal;  // vacuous truth over the empty universe
        for (int v = 0; v < k; ++v) {
          bool b = body.bit(idx * static_cast<size_t>(k) + static_cast<size_t>(v));
          if (universal ? !b : b) {
            value = !universal;
            break;
          }
        }
        result.setBit(idx, value);
      }
      break;
    }
  }
  if (cache) cache->emplace(f.id(), result);
  return result;
}

} // namespace

TupleSet evalFormula(const Formula& f, const FiniteModel& model, EvalCache* cache) {
  return evalNode(f, model, cache);
}

AxiomVerdict satisfiesAxiom(const FiniteModel& model, const CoherentAxiom& axiom) {
  TupleSet lhs = evalFormula(axiom.lhs, model);
  TupleSet rhs = evalFormula(axiom.rhs, model);
  AxiomVerdict verdict;
  verdict.counterexample = lhs.firstNotIn(rhs);
  verdict.holds = !verdict.counterexample.has_value();
  return verdict;
}

AxiomVerdict satisfiesAxiom(const FiniteModel& model, const Formula& sentence) {
  if (sentence.contextSize() != 0) throw Error("sentence axioms must be closed");
  AxiomVerdict verdict;
  verdict.holds = !evalFormula(sentence, model).empty();
  if (!verdict.holds) verdict.counterexample = std::vector<int>{};
  return verdict;
}

TheoryReport satisfiesTheory(const FiniteModel& model, const Theory& theory) {
  TheoryReport report;
  for (const CoherentAxiom& ax : theory.coherentAxioms)
    report.axiomVerdicts.push_back(satisfiesAxiom(model, ax));
  for (const Formula& s : theory.sentences)
    report.sentenceVerdicts.push_back(satisfiesAxiom(model, s));
  return report;
}

bool TheoryReport::allHold() const {
  for (const AxiomVerdict& v : axiomVerdicts)
    if (!v.holds) return false;
  for (const AxiomVerdict& v : sentenceVerdicts)
    if (!v.holds) return false;
  return true;
}

namespace {

// A relation's candidate tables in lexicographic bitmap order: the bit of the
// lexicographically first tuple is the most significant.
std::vector<std::vector<int>> tableFromMask(uint64_t mask, int arity, int size) {
  std::vector<std::vector<int>> tuples;
  size_t total = size == 0 && arity > 0 ? 0 : powSize(size, arity);
  TupleSet probe(arity, size);
  for (size_t t = 0; t < total; ++t) {
    if ((mask >> (total - 1 - t)) & 1ULL) tuples.push_back(probe.unrank(t));
  }
  return tuples;
}

bool usesOnlyRelations(const Formula& f, const std::vector<bool>& assigned,
                       const Language& language) {
  if (f.kind() == FormulaKind::Atom) {
    int idx = language.indexOf(f.relation());
    if (idx < 0 || !assigned[idx]) return false;
  }
  for (const Formula& p : f.parts())
    if (!usesOnlyRelations(p, assigned, language)) return false;
  return true;
}

int maxRelationLevel(const Formula& f, const Language& language) {
  int level = -1;
  if (f.kind() == FormulaKind::Atom) level = language.indexOf(f.relation());
  for (const Formula& p : f.parts()) level = std::max(level, maxRelationLevel(p, language));
  return level;
}

} // namespace

std::vector<FiniteModel> enumerateModels(const Language& language, const Theory& theory, int cap,
                                         long long budget) {
  // Axioms become checkable once every relation they mention has a table.
  struct Check {
    int level;
    bool isSentence;
    size_t index;
  };
  std::vector<Check> checks;
  for (size_t i = 0; i < theory.coherentAxioms.size(); ++i) {
    int lvl = std::max(maxRelationLevel(theory.coherentAxioms[i].lhs, language),
                       maxRelationLevel(theory.coherentAxioms[i].rhs, language));
    checks.push_back({lvl, false, i});
  }
  for (size_t i = 0; i < theory.sentences.size(); ++i)
    checks.push_back({maxRelationLevel(theory.sentences[i], language), true, i});

  const int relationCount = static_cast<int>(language.relations.size());
  std::vector<FiniteModel> out;
  long long visited = 0;

  for (int size = 0; size <= cap; ++size) {
    FiniteModel model = FiniteModel::empty(language, size);

    // Axioms mentioning no relation are size-only; check them once per size.
    bool sizeOk = true;
    for (const Check& c : checks) {
      if (c.level != -1) continue;
      AxiomVerdict v = c.isSentence ? satisfiesAxiom(model, theory.sentences[c.index])
                                    : satisfiesAxiom(model, theory.coherentAxioms[c.index]);
      if (!v.holds) {
        sizeOk = false;
        break;
      }
    }
    if (!sizeOk) continue;

    // Depth-first assignment of tables in declaration order with pruning at
    // each level; visits candidates in lexicographic bitmap order, so the
    // recorded models come out in the documented order.
    std::vector<FiniteModel>* sink = &out;
    auto recurse = [&](auto&& self, int level) -> void {
      if (level == relationCount) {
        sink->push_back(model);
        return;
      }
      const RelationSymbol& rel = language.relations[level];
      size_t bitCount = size == 0 && rel.arity > 0 ? 0 : powSize(size, rel.arity);
      if (bitCount > 30) throw BudgetExceeded("cap too large: relation " + rel.name + " has " +
                                              std::to_string(bitCount) + " tuple slots");
      uint64_t masks = 1ULL << bitCount;
      for (uint64_t mask = 0; mask < masks; ++mask) {
        if (budget > 0 && ++visited > budget)
          throw BudgetExceeded("cap too large: model enumeration exceeded the budget");
        model.tables[level].tuples = tableFromMask(mask, rel.arity, size);
        bool ok = true;
        for (const Check& c : checks) {
          if (c.level != level) continue;
          AxiomVerdict v = c.isSentence ? satisfiesAxiom(model, theory.sentences[c.index])
                                        : satisfiesAxiom(model, theory.coherentAxioms[c.index]);
          if (!v.holds) {
            ok = false;
            break;
          }
        }
        if (ok) self(self, level + 1);
      }
      model.tables[level].tuples.clear();
    };
    recurse(recurse, 0);
  }
  return out;
}

bool semanticallyEquivalent(const Formula& phi, const Formula& psi, const Language& language,
                            const Theory& theory, int cap) {
  if (phi.contextSize() != psi.contextSize())
    throw Error("semanticallyEquivalent requires equal context sizes");
  for (const FiniteModel& m : enumerateModels(language, theory, cap)) {
    if (!(evalFormula(phi, m) == evalFormula(psi, m))) return false;
  }
  return true;
}

} // namespace ilwb
