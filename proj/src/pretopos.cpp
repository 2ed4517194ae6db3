#include "ilwb/pretopos.hpp"

#include <algorithm>

#include "ilwb/errors.hpp"
#include "ilwb/parallel.hpp"

namespace ilwb {

namespace {

// Embed a formula into a larger context with its variables moved to a given
// offset, in order.
Formula embed(const Formula& f, int offset, int newContext) {
  std::vector<int> map(f.contextSize());
  for (int i = 0; i < f.contextSize(); ++i) map[i] = offset + i;
  return substituteVariables(f, map, newContext);
}

// Reindex a formula whose context is a concatenation of blocks; blockOffsets
// gives each block's position in the new context.
Formula placeBlocks(const Formula& f, const std::vector<int>& blockSizes,
                    const std::vector<int>& blockOffsets, int newContext) {
  std::vector<int> map;
  map.reserve(f.contextSize());
  for (size_t b = 0; b < blockSizes.size(); ++b)
    for (int i = 0; i < blockSizes[b]; ++i) map.push_back(blockOffsets[b] + i);
  return substituteVariables(f, map, newContext);
}

struct ClauseCheck {
  std::string clause;
  Formula premise;
  Formula conclusion;  // same context
  std::vector<int> pieceIndices;
};

ValidationReport runChecks(const std::vector<ClauseCheck>& checks, const Language& language,
                           const Theory& theory, int cap) {
  ValidationReport report;
  std::vector<FiniteModel> models = enumerateModels(language, theory, cap);
  // Per-model scans run in parallel; the reported witness is the first in
  // (model, check) order regardless of scheduling.
  std::vector<std::optional<ValidationWitness>> failures(models.size());
  parallelFor(models.size(), [&](size_t m) {
    for (const ClauseCheck& c : checks) {
      TupleSet premise = evalFormula(c.premise, models[m]);
      TupleSet conclusion = evalFormula(c.conclusion, models[m]);
      if (auto bad = premise.firstNotIn(conclusion)) {
        failures[m] = ValidationWitness{c.clause, static_cast<int>(m), models[m], *bad,
                                        c.pieceIndices};
        return;
      }
    }
  });
  for (const auto& failure : failures)
    if (failure) {
      report.valid = false;
      report.witness = failure;
      return report;
    }
  return report;
}

void checkShape(const ImaginarySort& sort) {
  size_t n = sort.pieces.size();
  if (sort.relations.size() != n) throw Error("sort relation matrix has the wrong row count");
  for (size_t i = 0; i < n; ++i) {
    if (sort.relations[i].size() != n)
      throw Error("sort relation matrix has the wrong column count");
    for (size_t j = 0; j < n; ++j) {
      int expected = sort.pieces[i].contextSize() + sort.pieces[j].contextSize();
      if (sort.relations[i][j].contextSize() != expected)
        throw Error("sort relation entry has the wrong context size");
    }
  }
}

} // namespace

bool ImaginarySort::operator==(const ImaginarySort& other) const {
  if (pieces.size() != other.pieces.size()) return false;
  for (size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i] != other.pieces[i]) return false;
  for (size_t i = 0; i < relations.size(); ++i)
    for (size_t j = 0; j < relations[i].size(); ++j)
      if (relations[i][j] != other.relations[i][j]) return false;
  return true;
}

ValidationReport validateSort(const ImaginarySort& sort, const Language& language,
                              const Theory& theory, int cap) {
  checkShape(sort);
  std::vector<ClauseCheck> checks;
  const int n = sort.pieceCount();
  for (int i = 0; i < n; ++i) {
    const int ni = sort.arity(i);
    // reflexivity: alpha_i(x) => eps_ii(x, x)
    std::vector<int> diag(2 * ni);
    for (int p = 0; p < ni; ++p) diag[p] = diag[ni + p] = p;
    checks.push_back({"reflexivity", sort.pieces[i],
                      substituteVariables(sort.relations[i][i], diag, ni), {i}});
    for (int j = 0; j < n; ++j) {
      const int nj = sort.arity(j);
      const int ctx = ni + nj;
      // typing: eps_ij(x, y) => alpha_i(x) /\ alpha_j(y)
      checks.push_back({"typing", sort.relations[i][j],
                        Formula::conj(ctx, {embed(sort.pieces[i], 0, ctx),
                                            embed(sort.pieces[j], ni, ctx)}),
                        {i, j}});
      // symmetry: eps_ij(x, y) => eps_ji(y, x)
      checks.push_back({"symmetry", sort.relations[i][j],
                        placeBlocks(sort.relations[j][i], {nj, ni}, {ni, 0}, ctx), {i, j}});
      for (int k = 0; k < n; ++k) {
        const int nk = sort.arity(k);
        const int ctx3 = ni + nj + nk;
        // transitivity: eps_ij(x, y) /\ eps_jk(y, z) => eps_ik(x, z)
        Formula premise = Formula::conj(
            ctx3, {placeBlocks(sort.relations[i][j], {ni, nj}, {0, ni}, ctx3),
                   placeBlocks(sort.relations[j][k], {nj, nk}, {ni, ni + nj}, ctx3)});
        checks.push_back({"transitivity", premise,
                          placeBlocks(sort.relations[i][k], {ni, nk}, {0, ni + nj}, ctx3),
                          {i, j, k}});
      }
    }
  }
  return runChecks(checks, language, theory, cap);
}

ValidationReport validateRelation(const DefinableRelation& relation, const Language& language,
                                  const Theory& theory, int cap) {
  const ImaginarySort& sort = relation.sort;
  if (relation.pieces.size() != sort.pieces.size())
    throw Error("definable relation has the wrong number of pieces");
  std::vector<ClauseCheck> checks;
  const int n = sort.pieceCount();
  for (int i = 0; i < n; ++i) {
    if (relation.pieces[i].contextSize() != sort.arity(i))
      throw Error("definable relation piece has the wrong context size");
    checks.push_back({"containment", relation.pieces[i], sort.pieces[i], {i}});
    for (int j = 0; j < n; ++j) {
      const int ctx = sort.arity(i) + sort.arity(j);
      Formula premise = Formula::conj(ctx, {embed(relation.pieces[i], 0, ctx),
                                            sort.relations[i][j]});
      checks.push_back({"invariance", premise,
                        embed(relation.pieces[j], sort.arity(i), ctx), {i, j}});
    }
  }
  return runChecks(checks, language, theory, cap);
}

ValidationReport validateFunction(const DefinableFunction& fn, const Language& language,
                                  const Theory& theory, int cap) {
  const ImaginarySort& a = fn.source;
  const ImaginarySort& b = fn.target;
  if (fn.graph.size() != a.pieces.size()) throw Error("function graph has the wrong row count");
  for (const auto& row : fn.graph)
    if (row.size() != b.pieces.size()) throw Error("function graph has the wrong column count");

  std::vector<ClauseCheck> checks;
  for (int i = 0; i < a.pieceCount(); ++i) {
    const int ni = a.arity(i);
    for (int k = 0; k < b.pieceCount(); ++k) {
      const int mk = b.arity(k);
      const int ctx = ni + mk;
      if (fn.graph[i][k].contextSize() != ctx)
        throw Error("function graph entry has the wrong context size");
      checks.push_back({"typing", fn.graph[i][k],
                        Formula::conj(ctx, {embed(a.pieces[i], 0, ctx), embed(b.pieces[k], ni, ctx)}),
                        {i, k}});
      for (int j = 0; j < a.pieceCount(); ++j) {
        const int nj = a.arity(j);
        const int ctx3 = ni + mk + nj;
        Formula premise = Formula::conj(
            ctx3, {placeBlocks(fn.graph[i][k], {ni, mk}, {0, ni}, ctx3),
                   placeBlocks(a.relations[i][j], {ni, nj}, {0, ni + mk}, ctx3)});
        checks.push_back({"left-invariance", premise,
                          placeBlocks(fn.graph[j][k], {nj, mk}, {ni + mk, ni}, ctx3), {i, k, j}});
      }
      for (int l = 0; l < b.pieceCount(); ++l) {
        const int ml = b.arity(l);
        const int ctx3 = ni + mk + ml;
        Formula premise = Formula::conj(
            ctx3, {placeBlocks(fn.graph[i][k], {ni, mk}, {0, ni}, ctx3),
                   placeBlocks(b.relations[k][l], {mk, ml}, {ni, ni + mk}, ctx3)});
        checks.push_back({"right-invariance", premise,
                          placeBlocks(fn.graph[i][l], {ni, ml}, {0, ni + mk}, ctx3), {i, k, l}});
        Formula premise2 = Formula::conj(
            ctx3, {placeBlocks(fn.graph[i][k], {ni, mk}, {0, ni}, ctx3),
                   placeBlocks(fn.graph[i][l], {ni, ml}, {0, ni + mk}, ctx3)});
        checks.push_back({"single-valuedness", premise2,
                          placeBlocks(b.relations[k][l], {mk, ml}, {ni, ni + mk}, ctx3),
                          {i, k, l}});
      }
    }
    // totality: alpha_i(x) => \/_k exists y. phi_ik(x, y)
    std::vector<Formula> images;
    for (int k = 0; k < b.pieceCount(); ++k)
      images.push_back(Formula::existsMany(b.arity(k), fn.graph[i][k]));
    checks.push_back({"totality", a.pieces[i], Formula::disj(ni, std::move(images)), {i}});
  }
  return runChecks(checks, language, theory, cap);
}

ImaginarySort sortFromFormula(const Formula& alpha) { return sortFromFormulas({alpha}); }

ImaginarySort sortFromFormulas(const std::vector<Formula>& alphas) {
  ImaginarySort sort;
  sort.pieces = alphas;
  const int n = static_cast<int>(alphas.size());
  sort.relations.resize(n);
  for (int i = 0; i < n; ++i) {
    const int ni = alphas[i].contextSize();
    for (int j = 0; j < n; ++j) {
      const int nj = alphas[j].contextSize();
      const int ctx = ni + nj;
      if (i != j) {
        // Distinct pieces are never identified.
        sort.relations[i].push_back(Formula::bottom(ctx));
        continue;
      }
      std::vector<Formula> eqs = {embed(alphas[i], 0, ctx)};
      for (int p = 0; p < ni; ++p) eqs.push_back(Formula::eq(p, ni + p, ctx));
      sort.relations[i].push_back(Formula::conj(ctx, std::move(eqs)));
    }
  }
  return sort;
}

ImaginarySort homeSort() { return sortFromFormula(Formula::top(1)); }

ImaginarySort homePowerSort(int n) { return sortFromFormula(Formula::top(n)); }

ImaginarySort relationAsSort(const DefinableRelation& relation) {
  ImaginarySort sort;
  sort.pieces = relation.pieces;
  const int n = static_cast<int>(relation.pieces.size());
  sort.relations.resize(n);
  for (int i = 0; i < n; ++i) {
    const int ni = relation.pieces[i].contextSize();
    for (int j = 0; j < n; ++j) {
      const int nj = relation.pieces[j].contextSize();
      const int ctx = ni + nj;
      sort.relations[i].push_back(
          Formula::conj(ctx, {embed(relation.pieces[i], 0, ctx),
                              embed(relation.pieces[j], ni, ctx),
                              relation.sort.relations[i][j]}));
    }
  }
  return sort;
}

DefinableFunction identityFunction(const ImaginarySort& sort) {
  DefinableFunction fn;
  fn.source = sort;
  fn.target = sort;
  fn.graph = sort.relations;
  return fn;
}

DefinableFunction composeFunctions(const DefinableFunction& g, const DefinableFunction& f) {
  if (!(f.target == g.source)) throw Error("composeFunctions: middle sorts differ");
  DefinableFunction out;
  out.source = f.source;
  out.target = g.target;
  const ImaginarySort& a = f.source;
  const ImaginarySort& b = f.target;
  const ImaginarySort& c = g.target;
  out.graph.resize(a.pieces.size());
  for (int i = 0; i < a.pieceCount(); ++i) {
    const int ni = a.arity(i);
    for (int m = 0; m < c.pieceCount(); ++m) {
      const int pm = c.arity(m);
      const int outer = ni + pm;
      std::vector<Formula> disjuncts;
      for (int k = 0; k < b.pieceCount(); ++k) {
        const int mk = b.arity(k);
        const int inner = outer + mk;  // bound block y_k on top
        Formula left = placeBlocks(f.graph[i][k], {ni, mk}, {0, outer}, inner);
        Formula right = placeBlocks(g.graph[k][m], {mk, pm}, {outer, ni}, inner);
        disjuncts.push_back(
            Formula::existsMany(mk, Formula::conj(inner, {left, right})));
      }
      out.graph[i].push_back(Formula::disj(outer, std::move(disjuncts)));
    }
  }
  return out;
}

ProductSort productSort(const ImaginarySort& a, const ImaginarySort& b) {
  ProductSort out;
  const int I = a.pieceCount();
  const int K = b.pieceCount();
  out.sort.pieces.reserve(I * K);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) {
      const int ctx = a.arity(i) + b.arity(k);
      out.sort.pieces.push_back(Formula::conj(
          ctx, {embed(a.pieces[i], 0, ctx), embed(b.pieces[k], a.arity(i), ctx)}));
    }
  out.sort.relations.resize(I * K);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < I; ++j)
        for (int l = 0; l < K; ++l) {
          const int ni = a.arity(i), mk = b.arity(k), nj = a.arity(j), ml = b.arity(l);
          const int ctx = ni + mk + nj + ml;
          Formula eps = placeBlocks(a.relations[i][j], {ni, nj}, {0, ni + mk}, ctx);
          Formula eta = placeBlocks(b.relations[k][l], {mk, ml}, {ni, ni + mk + nj}, ctx);
          out.sort.relations[i * K + k].push_back(Formula::conj(ctx, {eps, eta}));
        }

  out.left.source = out.sort;
  out.left.target = a;
  out.left.graph.resize(I * K);
  out.right.source = out.sort;
  out.right.target = b;
  out.right.graph.resize(I * K);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) {
      const int ni = a.arity(i), mk = b.arity(k);
      for (int j = 0; j < I; ++j) {
        const int nj = a.arity(j);
        const int ctx = ni + mk + nj;
        Formula graph = Formula::conj(
            ctx, {embed(b.pieces[k], ni, ctx),
                  placeBlocks(a.relations[i][j], {ni, nj}, {0, ni + mk}, ctx)});
        out.left.graph[i * K + k].push_back(graph);
      }
      for (int l = 0; l < K; ++l) {
        const int ml = b.arity(l);
        const int ctx = ni + mk + ml;
        Formula graph = Formula::conj(
            ctx, {embed(a.pieces[i], 0, ctx),
                  placeBlocks(b.relations[k][l], {mk, ml}, {ni, ni + mk}, ctx)});
        out.right.graph[i * K + k].push_back(graph);
      }
    }
  return out;
}

ImaginarySort powerSort(const ImaginarySort& a, int n) {
  const int I = a.pieceCount();
  ImaginarySort out;
  if (n == 0) {
    out.pieces = {Formula::top(0)};
    out.relations = {{Formula::top(0)}};
    return out;
  }
  int total = 1;
  for (int t = 0; t < n; ++t) total *= I;
  for (int flat = 0; flat < total; ++flat) {
    std::vector<int> idx = powerPieceIndex(a, n, flat);
    int ctx = 0;
    for (int t = 0; t < n; ++t) ctx += a.arity(idx[t]);
    std::vector<Formula> parts;
    int offset = 0;
    for (int t = 0; t < n; ++t) {
      parts.push_back(embed(a.pieces[idx[t]], offset, ctx));
      offset += a.arity(idx[t]);
    }
    out.pieces.push_back(Formula::conj(ctx, std::move(parts)));
  }
  out.relations.resize(total);
  for (int f1 = 0; f1 < total; ++f1) {
    std::vector<int> idx1 = powerPieceIndex(a, n, f1);
    int ctx1 = out.pieces[f1].contextSize();
    for (int f2 = 0; f2 < total; ++f2) {
      std::vector<int> idx2 = powerPieceIndex(a, n, f2);
      int ctx2 = out.pieces[f2].contextSize();
      const int ctx = ctx1 + ctx2;
      std::vector<Formula> parts;
      int off1 = 0, off2 = ctx1;
      for (int t = 0; t < n; ++t) {
        const int n1 = a.arity(idx1[t]);
        const int n2 = a.arity(idx2[t]);
        parts.push_back(
            placeBlocks(a.relations[idx1[t]][idx2[t]], {n1, n2}, {off1, off2}, ctx));
        off1 += n1;
        off2 += n2;
      }
      out.relations[f1].push_back(Formula::conj(ctx, std::move(parts)));
    }
  }
  return out;
}

std::vector<int> powerPieceIndex(const ImaginarySort& a, int n, int flatIndex) {
  const int I = a.pieceCount();
  std::vector<int> idx(n, 0);
  for (int t = n - 1; t >= 0; --t) {
    idx[t] = flatIndex % I;
    flatIndex /= I;
  }
  return idx;
}

int powerPieceFlat(const ImaginarySort& a, int n, const std::vector<int>& indices) {
  const int I = a.pieceCount();
  int flat = 0;
  for (int t = 0; t < n; ++t) flat = flat * I + indices[t];
  return flat;
}

DefinableRelation equalizerSort(const DefinableFunction& f, const DefinableFunction& g) {
  if (!(f.source == g.source) || !(f.target == g.target))
    throw Error("equalizerSort requires parallel functions");
  const ImaginarySort& a = f.source;
  const ImaginarySort& b = f.target;
  DefinableRelation out;
  out.sort = a;
  for (int i = 0; i < a.pieceCount(); ++i) {
    const int ni = a.arity(i);
    std::vector<Formula> disjuncts;
    for (int k = 0; k < b.pieceCount(); ++k) {
      const int mk = b.arity(k);
      const int inner = ni + mk;
      Formula both = Formula::conj(inner, {f.graph[i][k], g.graph[i][k]});
      disjuncts.push_back(Formula::existsMany(mk, both));
    }
    out.pieces.push_back(Formula::disj(ni, std::move(disjuncts)));
  }
  return out;
}

Formula subobjectOp(SubobjectOp op, const std::vector<Formula>& operands, LogicMode mode) {
  switch (op) {
    case SubobjectOp::Meet:
    case SubobjectOp::Join: {
      if (operands.empty()) throw Error("subobjectOp needs the ambient context; give operands");
      int ctx = operands.front().contextSize();
      for (const Formula& f : operands)
        if (f.contextSize() != ctx) throw Error("subobjectOp operands disagree on context");
      return op == SubobjectOp::Meet ? Formula::conj(ctx, operands)
                                     : Formula::disj(ctx, operands);
    }
    case SubobjectOp::Complement:
      if (mode != LogicMode::Boolean)
        throw Error("complement is only available in Boolean mode");
      if (operands.size() != 1) throw Error("complement takes one operand");
      return Formula::negation(operands.front());
    case SubobjectOp::ExistsImage:
      if (operands.size() != 1) throw Error("existsImage takes one operand");
      if (operands.front().contextSize() < 1)
        throw Error("existsImage needs at least one variable");
      return Formula::exists(operands.front());
  }
  throw Error("unreachable");
}

DefinableRelation subobjectOp(SubobjectOp op, const std::vector<DefinableRelation>& operands,
                              LogicMode mode) {
  if (operands.empty()) throw Error("subobjectOp needs at least one relation");
  const ImaginarySort& sort = operands.front().sort;
  for (const DefinableRelation& r : operands)
    if (!(r.sort == sort)) throw Error("subobjectOp relations live on different sorts");
  DefinableRelation out;
  out.sort = sort;
  for (int i = 0; i < sort.pieceCount(); ++i) {
    const int ni = sort.arity(i);
    switch (op) {
      case SubobjectOp::Meet:
      case SubobjectOp::Join: {
        std::vector<Formula> parts;
        for (const DefinableRelation& r : operands) parts.push_back(r.pieces[i]);
        out.pieces.push_back(op == SubobjectOp::Meet ? Formula::conj(ni, std::move(parts))
                                                     : Formula::disj(ni, std::move(parts)));
        break;
      }
      case SubobjectOp::Complement: {
        if (mode != LogicMode::Boolean)
          throw Error("complement is only available in Boolean mode");
        if (operands.size() != 1) throw Error("complement takes one operand");
        out.pieces.push_back(Formula::conj(
            ni, {sort.pieces[i], Formula::negation(operands.front().pieces[i])}));
        break;
      }
      case SubobjectOp::ExistsImage:
        throw Error("existsImage is a formula-level operation");
    }
  }
  return out;
}

} // namespace ilwb
