#include "ilwb/coding.hpp"

#include <algorithm>
#include <numeric>

#include "ilwb/errors.hpp"

namespace ilwb {

CodedMap CodedMap::identity(int size) {
  CodedMap m;
  m.sourceSize = m.targetSize = size;
  m.values.resize(size);
  std::iota(m.values.begin(), m.values.end(), 0);
  return m;
}

CodedMap CodedMap::compose(const CodedMap& outer, const CodedMap& inner) {
  if (inner.targetSize != outer.sourceSize) throw Error("CodedMap::compose: sizes do not match");
  CodedMap m;
  m.sourceSize = inner.sourceSize;
  m.targetSize = outer.targetSize;
  m.values.reserve(inner.values.size());
  for (int v : inner.values) m.values.push_back(outer.values.at(v));
  return m;
}

bool CodedMap::isBijection() const {
  if (sourceSize != targetSize) return false;
  std::vector<bool> seen(targetSize, false);
  for (int v : values) {
    if (v < 0 || v >= targetSize || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

CodedMap CodedMap::inverse() const {
  if (!isBijection()) throw Error("CodedMap::inverse: not a bijection");
  CodedMap m;
  m.sourceSize = targetSize;
  m.targetSize = sourceSize;
  m.values.resize(sourceSize);
  for (int i = 0; i < sourceSize; ++i) m.values[values[i]] = i;
  return m;
}

ProductCoding codeProduct(CodedSet m, CodedSet n) {
  ProductCoding out;
  out.product.size = m.size * n.size;
  out.first = {out.product.size, m.size, {}};
  out.second = {out.product.size, n.size, {}};
  for (int i = 0; i < out.product.size; ++i) {
    out.first.values.push_back(i / n.size);
    out.second.values.push_back(i % n.size);
  }
  return out;
}

InjectionCoding codeEqualizer(const CodedMap& f, const CodedMap& g) {
  if (f.sourceSize != g.sourceSize || f.targetSize != g.targetSize)
    throw Error("codeEqualizer: maps are not parallel");
  InjectionCoding out;
  out.include = {0, f.sourceSize, {}};
  for (int i = 0; i < f.sourceSize; ++i)
    if (f.values[i] == g.values[i]) out.include.values.push_back(i);
  out.subset.size = static_cast<int>(out.include.values.size());
  out.include.sourceSize = out.subset.size;
  return out;
}

PullbackCoding codePullback(const CodedMap& f, const CodedMap& g) {
  if (f.targetSize != g.targetSize) throw Error("codePullback: targets differ");
  PullbackCoding out;
  out.first = {0, f.sourceSize, {}};
  out.second = {0, g.sourceSize, {}};
  for (int i = 0; i < f.sourceSize; ++i)
    for (int j = 0; j < g.sourceSize; ++j)
      if (f.values[i] == g.values[j]) {
        out.first.values.push_back(i);
        out.second.values.push_back(j);
      }
  out.pullback.size = static_cast<int>(out.first.values.size());
  out.first.sourceSize = out.second.sourceSize = out.pullback.size;
  return out;
}

DisjointUnionCoding codeDisjointUnion(const std::vector<CodedSet>& parts) {
  DisjointUnionCoding out;
  int offset = 0;
  for (const CodedSet& p : parts) {
    CodedMap inj;
    inj.sourceSize = p.size;
    for (int i = 0; i < p.size; ++i) inj.values.push_back(offset + i);
    out.injections.push_back(std::move(inj));
    offset += p.size;
  }
  out.total.size = offset;
  for (CodedMap& inj : out.injections) inj.targetSize = offset;
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

QuotientCoding quotientFromUnionFind(int size, UnionFind& uf) {
  QuotientCoding out;
  out.projection = {size, 0, std::vector<int>(size, -1)};
  std::vector<int> classOfRoot(size, -1);
  int next = 0;
  for (int i = 0; i < size; ++i) {
    int r = uf.find(i);
    if (classOfRoot[r] == -1) classOfRoot[r] = next++;  // least element first
    out.projection.values[i] = classOfRoot[r];
  }
  out.quotient.size = next;
  out.projection.targetSize = next;
  return out;
}

} // namespace

QuotientCoding codeQuotient(const CodedMap& p, const CodedMap& q) {
  if (p.sourceSize != q.sourceSize || p.targetSize != q.targetSize)
    throw Error("codeQuotient: maps are not parallel");
  const int n = p.targetSize;
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (int i = 0; i < p.sourceSize; ++i) {
    if (rel[p.values[i]][q.values[i]]) throw Error("codeQuotient: (p, q) is not injective");
    rel[p.values[i]][q.values[i]] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!rel[i][i]) throw Error("codeQuotient: relation is not reflexive");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rel[i][j] && !rel[j][i]) throw Error("codeQuotient: relation is not symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (rel[i][j] && rel[j][k] && !rel[i][k])
          throw Error("codeQuotient: relation is not transitive");
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rel[i][j]) uf.unite(i, j);
  return quotientFromUnionFind(n, uf);
}

QuotientCoding codeQuotientByPairs(int size, const std::vector<std::pair<int, int>>& pairs) {
  UnionFind uf(size);
  for (const auto& [a, b] : pairs) uf.unite(a, b);
  return quotientFromUnionFind(size, uf);
}

ImageCoding codeImageFactorization(const CodedMap& f) {
  ImageCoding out;
  out.surjection = {f.sourceSize, 0, {}};
  out.injection = {0, f.targetSize, {}};
  std::vector<int> indexOfValue(f.targetSize, -1);
  for (int i = 0; i < f.sourceSize; ++i) {
    int v = f.values[i];
    if (indexOfValue[v] == -1) {
      indexOfValue[v] = static_cast<int>(out.injection.values.size());
      out.injection.values.push_back(v);
    }
    out.surjection.values.push_back(indexOfValue[v]);
  }
  out.image.size = static_cast<int>(out.injection.values.size());
  out.surjection.targetSize = out.image.size;
  out.injection.sourceSize = out.image.size;
  return out;
}

InjectionCoding codeUnionOfInjections(CodedSet ambient, const std::vector<CodedMap>& injections) {
  std::vector<bool> present(ambient.size, false);
  for (const CodedMap& inj : injections) {
    if (inj.targetSize != ambient.size) throw Error("codeUnionOfInjections: ambient mismatch");
    std::vector<bool> seen(ambient.size, false);
    for (int v : inj.values) {
      if (seen[v]) throw Error("codeUnionOfInjections: map is not injective");
      seen[v] = true;
      present[v] = true;
    }
  }
  InjectionCoding out;
  out.include = {0, ambient.size, {}};
  for (int i = 0; i < ambient.size; ++i)
    if (present[i]) out.include.values.push_back(i);
  out.subset.size = static_cast<int>(out.include.values.size());
  out.include.sourceSize = out.subset.size;
  return out;
}

InjectionCoding codeComplementOfInjection(const CodedMap& f) {
  std::vector<bool> present(f.targetSize, false);
  for (int v : f.values) {
    if (present[v]) throw Error("codeComplementOfInjection: map is not injective");
    present[v] = true;
  }
  InjectionCoding out;
  out.include = {0, f.targetSize, {}};
  for (int i = 0; i < f.targetSize; ++i)
    if (!present[i]) out.include.values.push_back(i);
  out.subset.size = static_cast<int>(out.include.values.size());
  out.include.sourceSize = out.subset.size;
  return out;
}

int InterpretedSort::classIndex(int piece, const std::vector<int>& tuple) const {
  auto it = classOf.find({piece, tuple});
  if (it == classOf.end()) throw Error("element is not in the interpreted sort");
  return it->second;
}

InterpretedSort interpretSortInModel(const ImaginarySort& sort, const FiniteModel& model) {
  InterpretedSort out;
  out.model = model;

  // Elements of the disjoint union, in (piece, lexicographic tuple) order.
  std::vector<std::pair<int, std::vector<int>>> elements;
  std::map<std::pair<int, std::vector<int>>, int> position;
  std::vector<TupleSet> pieceSets;
  for (int i = 0; i < sort.pieceCount(); ++i) {
    TupleSet set = evalFormula(sort.pieces[i], model);
    for (const std::vector<int>& t : set.tuples()) {
      position.emplace(std::make_pair(i, t), static_cast<int>(elements.size()));
      elements.emplace_back(i, t);
    }
    pieceSets.push_back(std::move(set));
  }

  // The evaluated equivalence relation; verified to actually be one so that
  // invalid sorts fail loudly here rather than corrupting the quotient.
  const int n = static_cast<int>(elements.size());
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (int i = 0; i < sort.pieceCount(); ++i) {
    const int ni = sort.arity(i);
    for (int j = 0; j < sort.pieceCount(); ++j) {
      TupleSet set = evalFormula(sort.relations[i][j], model);
      for (const std::vector<int>& t : set.tuples()) {
        std::vector<int> left(t.begin(), t.begin() + ni);
        std::vector<int> right(t.begin() + ni, t.end());
        auto a = position.find({i, left});
        auto b = position.find({j, right});
        if (a == position.end() || b == position.end())
          throw Error("sort invalid on model: relation tuple escapes the pieces");
        rel[a->second][b->second] = true;
      }
    }
  }
  for (int a = 0; a < n; ++a)
    if (!rel[a][a]) throw Error("sort invalid on model: relation is not reflexive");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (rel[a][b] && !rel[b][a])
        throw Error("sort invalid on model: relation is not symmetric");
      if (!rel[a][b]) continue;
      for (int c = 0; c < n; ++c)
        if (rel[b][c] && !rel[a][c])
          throw Error("sort invalid on model: relation is not transitive");
    }

  UnionFind uf(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rel[a][b]) uf.unite(a, b);

  std::vector<int> classOfRoot(n, -1);
  int next = 0;
  for (int a = 0; a < n; ++a) {
    int r = uf.find(a);
    if (classOfRoot[r] == -1) {
      classOfRoot[r] = next++;
      out.representatives.push_back(elements[a]);
    }
    out.classOf.emplace(elements[a], classOfRoot[r]);
  }
  out.carrier.size = next;
  return out;
}

CodedMap interpretFunctionInModel(const DefinableFunction& fn, const FiniteModel& model) {
  InterpretedSort source = interpretSortInModel(fn.source, model);
  InterpretedSort target = interpretSortInModel(fn.target, model);
  return interpretFunctionInModel(fn, source, target);
}

CodedMap interpretFunctionInModel(const DefinableFunction& fn, const InterpretedSort& source,
                                  const InterpretedSort& target) {
  const FiniteModel& model = source.model;
  CodedMap out;
  out.sourceSize = source.carrier.size;
  out.targetSize = target.carrier.size;
  out.values.assign(source.carrier.size, -1);
  for (int i = 0; i < fn.source.pieceCount(); ++i) {
    const int ni = fn.source.arity(i);
    for (int k = 0; k < fn.target.pieceCount(); ++k) {
      TupleSet set = evalFormula(fn.graph[i][k], model);
      for (const std::vector<int>& t : set.tuples()) {
        std::vector<int> left(t.begin(), t.begin() + ni);
        std::vector<int> right(t.begin() + ni, t.end());
        int a = source.classIndex(i, left);
        int b = target.classIndex(k, right);
        if (out.values[a] != -1 && out.values[a] != b)
          throw Error("function graph is not single-valued on this model");
        out.values[a] = b;
      }
    }
  }
  for (int a = 0; a < out.sourceSize; ++a)
    if (out.values[a] == -1) throw Error("function graph is not total on this model");
  return out;
}

CodedMap transportAlongIso(const ImaginarySort& sort, const FiniteModel& source,
                           const FiniteModel& target, const std::vector<int>& permutation) {
  InterpretedSort from = interpretSortInModel(sort, source);
  InterpretedSort to = interpretSortInModel(sort, target);
  return transportAlongIso(from, to, permutation);
}

CodedMap transportAlongIso(const InterpretedSort& from, const InterpretedSort& to,
                           const std::vector<int>& permutation) {
  if (static_cast<int>(permutation.size()) != from.model.size)
    throw Error("transportAlongIso: permutation has the wrong size");
  CodedMap out;
  out.sourceSize = from.carrier.size;
  out.targetSize = to.carrier.size;
  out.values.assign(from.carrier.size, -1);
  // Map every element, not just representatives, so a representative-dependent
  // answer is caught immediately.
  for (const auto& [element, cls] : from.classOf) {
    std::vector<int> image;
    image.reserve(element.second.size());
    for (int v : element.second) image.push_back(permutation.at(v));
    int imageClass = to.classIndex(element.first, image);
    if (out.values[cls] != -1 && out.values[cls] != imageClass)
      throw Error("transportAlongIso: image class depends on the representative");
    out.values[cls] = imageClass;
  }
  if (!out.isBijection()) throw Error("transportAlongIso: transported map is not a bijection");
  return out;
}

namespace {

// All automorphisms of a model, as permutations in lexicographic order.
std::vector<std::vector<int>> automorphisms(const FiniteModel& model) {
  std::vector<std::vector<int>> out;
  std::vector<int> perm(model.size);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (const FiniteModel::Table& t : model.tables) {
      for (const std::vector<int>& tuple : t.tuples) {
        std::vector<int> image;
        image.reserve(tuple.size());
        for (int v : tuple) image.push_back(perm[v]);
        if (!std::binary_search(t.tuples.begin(), t.tuples.end(), image)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool equivariantBijectionExists(const std::vector<CodedMap>& actionA,
                                const std::vector<CodedMap>& actionB, int sizeA, int sizeB) {
  if (sizeA != sizeB) return false;
  std::vector<int> assignment(sizeA, -1);
  std::vector<bool> used(sizeB, false);
  auto recurse = [&](auto&& self, int a) -> bool {
    if (a == sizeA) return true;
    for (int b = 0; b < sizeB; ++b) {
      if (used[b]) continue;
      assignment[a] = b;
      used[b] = true;
      bool consistent = true;
      for (size_t g = 0; g < actionA.size() && consistent; ++g) {
        for (int x = 0; x <= a && consistent; ++x) {
          if (assignment[x] == -1) continue;
          int gx = actionA[g].values[x];
          if (gx <= a && assignment[gx] != -1 &&
              actionB[g].values[assignment[x]] != assignment[gx])
            consistent = false;
        }
      }
      if (consistent && self(self, a + 1)) return true;
      assignment[a] = -1;
      used[b] = false;
    }
    return false;
  };
  return recurse(recurse, 0);
}

} // namespace

namespace {

bool modelsIsomorphic(const FiniteModel& m, const FiniteModel& n) {
  if (m.size != n.size || m.tables.size() != n.tables.size()) return false;
  for (size_t t = 0; t < m.tables.size(); ++t)
    if (m.tables[t].tuples.size() != n.tables[t].tuples.size()) return false;
  std::vector<int> perm(m.size);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (size_t t = 0; t < m.tables.size() && ok; ++t)
      for (const std::vector<int>& tuple : m.tables[t].tuples) {
        std::vector<int> image;
        image.reserve(tuple.size());
        for (int v : tuple) image.push_back(perm[v]);
        if (!std::binary_search(n.tables[t].tuples.begin(), n.tables[t].tuples.end(), image)) {
          ok = false;
          break;
        }
      }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

} // namespace

bool sortsIsomorphicAtCap(const ImaginarySort& a, const ImaginarySort& b, const Language& language,
                          const Theory& theory, int cap) {
  std::vector<FiniteModel> models = enumerateModels(language, theory, cap);
  std::vector<bool> covered(models.size(), false);
  for (size_t m = 0; m < models.size(); ++m) {
    if (covered[m]) continue;
    std::vector<std::vector<int>> perms = automorphisms(models[m]);
    InterpretedSort fiberA = interpretSortInModel(a, models[m]);
    InterpretedSort fiberB = interpretSortInModel(b, models[m]);
    std::vector<CodedMap> actionA, actionB;
    for (const std::vector<int>& p : perms) {
      actionA.push_back(transportAlongIso(fiberA, fiberA, p));
      actionB.push_back(transportAlongIso(fiberB, fiberB, p));
    }
    if (!equivariantBijectionExists(actionA, actionB, fiberA.carrier.size, fiberB.carrier.size))
      return false;
    covered[m] = true;
    // A representative decides its whole isomorphism class.
    for (size_t k = m + 1; k < models.size(); ++k)
      if (!covered[k] && modelsIsomorphic(models[m], models[k])) covered[k] = true;
  }
  return true;
}

} // namespace ilwb
