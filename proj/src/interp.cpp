#include "ilwb/interp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ilwb/errors.hpp"

namespace ilwb {

namespace {

Formula embed(const Formula& f, int offset, int newContext) {
  std::vector<int> map(f.contextSize());
  for (int i = 0; i < f.contextSize(); ++i) map[i] = offset + i;
  return substituteVariables(f, map, newContext);
}

// Offsets of each coordinate block inside a power piece's context.
std::vector<int> blockOffsets(const ImaginarySort& sort, const std::vector<int>& pieceIndices) {
  std::vector<int> offsets;
  int acc = 0;
  for (int idx : pieceIndices) {
    offsets.push_back(acc);
    acc += sort.arity(idx);
  }
  offsets.push_back(acc);  // total context size as a sentinel
  return offsets;
}

} // namespace

Interpretation identityInterpretation(const Language& language, const Theory& theory) {
  Interpretation interp;
  interp.sourceLanguage = language;
  interp.sourceTheory = theory;
  interp.targetLanguage = language;
  interp.targetTheory = theory;
  interp.homSortImage = homeSort();
  for (const RelationSymbol& r : language.relations) {
    DefinableRelation rel;
    rel.sort = powerSort(interp.homSortImage, r.arity);
    std::vector<int> ids(r.arity);
    std::iota(ids.begin(), ids.end(), 0);
    rel.pieces = {Formula::atom(r.name, ids, r.arity)};
    interp.relationImages.push_back(std::move(rel));
  }
  return interp;
}

DefinableRelation translateFormulaAlong(const Interpretation& interp, const Formula& phi) {
  if (interp.mode == LogicMode::Coherent && !isCoherent(phi))
    throw Error("translateFormulaAlong: non-coherent formula outside Boolean mode");

  const ImaginarySort& hom = interp.homSortImage;
  const int n = phi.contextSize();
  DefinableRelation out;
  out.sort = powerSort(hom, n);
  const int pieceCount = out.sort.pieceCount();

  switch (phi.kind()) {
    case FormulaKind::True:
      out.pieces = out.sort.pieces;
      return out;
    case FormulaKind::False:
      for (int p = 0; p < pieceCount; ++p)
        out.pieces.push_back(Formula::bottom(out.sort.arity(p)));
      return out;
    case FormulaKind::Atom: {
      int relIndex = interp.sourceLanguage.indexOf(phi.relation());
      if (relIndex < 0)
        throw LanguageMismatch("interpretation has no image for relation " + phi.relation());
      const DefinableRelation& image = interp.relationImages[relIndex];
      const int a = static_cast<int>(phi.args().size());
      for (int p = 0; p < pieceCount; ++p) {
        std::vector<int> idx = powerPieceIndex(hom, n, p);
        const int ctx = out.sort.arity(p);
        std::vector<int> offsets = blockOffsets(hom, idx);
        // The image's argument blocks land on the blocks of the addressed
        // coordinates.
        std::vector<int> argPieces;
        std::vector<int> map;
        for (int t = 0; t < a; ++t) {
          int coord = phi.args()[t];
          argPieces.push_back(idx[coord]);
          for (int q = 0; q < hom.arity(idx[coord]); ++q) map.push_back(offsets[coord] + q);
        }
        Formula imagePiece = image.pieces[powerPieceFlat(hom, a, argPieces)];
        Formula placed = substituteVariables(imagePiece, map, ctx);
        out.pieces.push_back(Formula::conj(ctx, {placed, out.sort.pieces[p]}));
      }
      return out;
    }
    case FormulaKind::Eq: {
      const int i = phi.args()[0], j = phi.args()[1];
      for (int p = 0; p < pieceCount; ++p) {
        std::vector<int> idx = powerPieceIndex(hom, n, p);
        const int ctx = out.sort.arity(p);
        std::vector<int> offsets = blockOffsets(hom, idx);
        std::vector<int> map;
        for (int q = 0; q < hom.arity(idx[i]); ++q) map.push_back(offsets[i] + q);
        for (int q = 0; q < hom.arity(idx[j]); ++q) map.push_back(offsets[j] + q);
        Formula placed = substituteVariables(hom.relations[idx[i]][idx[j]], map, ctx);
        out.pieces.push_back(Formula::conj(ctx, {placed, out.sort.pieces[p]}));
      }
      return out;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<DefinableRelation> parts;
      for (const Formula& sub : phi.parts()) parts.push_back(translateFormulaAlong(interp, sub));
      for (int p = 0; p < pieceCount; ++p) {
        const int ctx = out.sort.arity(p);
        std::vector<Formula> members;
        for (const DefinableRelation& part : parts) members.push_back(part.pieces[p]);
        if (phi.kind() == FormulaKind::And) {
          members.push_back(out.sort.pieces[p]);
          out.pieces.push_back(Formula::conj(ctx, std::move(members)));
        } else {
          out.pieces.push_back(Formula::disj(ctx, std::move(members)));
        }
      }
      return out;
    }
    case FormulaKind::Not: {
      DefinableRelation inner = translateFormulaAlong(interp, phi.child());
      for (int p = 0; p < pieceCount; ++p) {
        const int ctx = out.sort.arity(p);
        out.pieces.push_back(Formula::conj(
            ctx, {out.sort.pieces[p], Formula::negation(inner.pieces[p])}));
      }
      return out;
    }
    case FormulaKind::Exists: {
      DefinableRelation inner = translateFormulaAlong(interp, phi.child());
      const int I = hom.pieceCount();
      for (int p = 0; p < pieceCount; ++p) {
        std::vector<int> idx = powerPieceIndex(hom, n, p);
        const int ctx = out.sort.arity(p);
        std::vector<Formula> disjuncts;
        for (int j = 0; j < I; ++j) {
          std::vector<int> extended = idx;
          extended.push_back(j);
          Formula body = inner.pieces[powerPieceFlat(hom, n + 1, extended)];
          disjuncts.push_back(Formula::existsMany(hom.arity(j), body));
        }
        out.pieces.push_back(Formula::disj(ctx, std::move(disjuncts)));
      }
      return out;
    }
    case FormulaKind::Forall:
      return translateFormulaAlong(
          interp, Formula::negation(Formula::exists(Formula::negation(phi.child()))));
  }
  throw Error("unreachable");
}

namespace {

// Arity of the power of homSort on which the relation lives, recovered from
// the piece count (with the context size breaking the tie for single-piece
// hom sorts).
int powerArity(const DefinableRelation& relation, const ImaginarySort& homSort) {
  const int I = homSort.pieceCount();
  const int pieces = static_cast<int>(relation.pieces.size());
  if (I == 1) {
    if (pieces != 1) throw Error("relation piece count is not a power of the sort's");
    int per = homSort.arity(0);
    int ctx = relation.pieces[0].contextSize();
    if (per == 0) return 0;
    if (ctx % per != 0) throw Error("relation context does not match the hom sort");
    return ctx / per;
  }
  int arity = 0;
  int count = 1;
  while (count < pieces) {
    count *= I;
    ++arity;
  }
  if (count != pieces) throw Error("relation piece count is not a power of the sort's");
  return arity;
}

} // namespace

std::set<std::vector<int>> interpretRelationClassesImpl(const DefinableRelation& relation,
                                                        const ImaginarySort& homSort,
                                                        const InterpretedSort& fiber, int arity) {
  std::set<std::vector<int>> out;
  const FiniteModel& model = fiber.model;
  for (size_t p = 0; p < relation.pieces.size(); ++p) {
    std::vector<int> idx = powerPieceIndex(homSort, arity, static_cast<int>(p));
    TupleSet set = evalFormula(relation.pieces[p], model);
    for (const std::vector<int>& tuple : set.tuples()) {
      std::vector<int> classes;
      int offset = 0;
      for (int t = 0; t < arity; ++t) {
        const int len = homSort.arity(idx[t]);
        std::vector<int> block(tuple.begin() + offset, tuple.begin() + offset + len);
        offset += len;
        classes.push_back(fiber.classIndex(idx[t], block));
      }
      out.insert(std::move(classes));
    }
  }
  return out;
}

std::set<std::vector<int>> interpretRelationClasses(const DefinableRelation& relation,
                                                    const ImaginarySort& homSort,
                                                    const InterpretedSort& fiber) {
  return interpretRelationClassesImpl(relation, homSort, fiber, powerArity(relation, homSort));
}

InterpretationReport validateInterpretation(const Interpretation& interp, int cap) {
  InterpretationReport report;
  const Language& tl = interp.targetLanguage;
  const Theory& tt = interp.targetTheory;

  ValidationReport sortReport = validateSort(interp.homSortImage, tl, tt, cap);
  if (!sortReport.valid) {
    report.valid = false;
    report.sortWitness = sortReport.witness;
    report.checks.push_back({"homSortImage satisfies the equivalence schema", false, -1, {}});
    return report;
  }
  report.checks.push_back({"homSortImage satisfies the equivalence schema", true, -1, {}});

  if (interp.relationImages.size() != interp.sourceLanguage.relations.size())
    throw Error("interpretation must provide one relation image per source relation");
  for (size_t r = 0; r < interp.relationImages.size(); ++r) {
    const RelationSymbol& rel = interp.sourceLanguage.relations[r];
    ValidationReport relReport = validateRelation(interp.relationImages[r], tl, tt, cap);
    report.checks.push_back({"image of " + rel.name + " is a definable relation",
                             relReport.valid, -1, {}});
    if (!relReport.valid) {
      report.valid = false;
      report.sortWitness = relReport.witness;
      return report;
    }
  }

  std::vector<FiniteModel> models = enumerateModels(tl, tt, cap);
  std::vector<InterpretedSort> fibers;
  for (const FiniteModel& m : models) fibers.push_back(interpretSortInModel(interp.homSortImage, m));

  auto checkInclusion = [&](const Formula& lhs, const Formula& rhs, const std::string& what) {
    DefinableRelation left = translateFormulaAlong(interp, lhs);
    DefinableRelation right = translateFormulaAlong(interp, rhs);
    for (size_t m = 0; m < models.size(); ++m) {
      auto leftClasses =
          interpretRelationClassesImpl(left, interp.homSortImage, fibers[m], lhs.contextSize());
      auto rightClasses =
          interpretRelationClassesImpl(right, interp.homSortImage, fibers[m], rhs.contextSize());
      for (const std::vector<int>& tuple : leftClasses)
        if (!rightClasses.count(tuple)) {
          report.valid = false;
          report.checks.push_back({what, false, static_cast<int>(m), tuple});
          return false;
        }
    }
    report.checks.push_back({what, true, -1, {}});
    return true;
  };

  for (size_t a = 0; a < interp.sourceTheory.coherentAxioms.size(); ++a) {
    const CoherentAxiom& ax = interp.sourceTheory.coherentAxioms[a];
    if (!checkInclusion(ax.lhs, ax.rhs, "axiom " + std::to_string(a) + " transports")) return report;
  }
  for (size_t s = 0; s < interp.sourceTheory.sentences.size(); ++s) {
    const Formula& sentence = interp.sourceTheory.sentences[s];
    DefinableRelation translated = translateFormulaAlong(interp, sentence);
    for (size_t m = 0; m < models.size(); ++m) {
      auto classes = interpretRelationClassesImpl(translated, interp.homSortImage, fibers[m], 0);
      if (classes.empty()) {
        report.valid = false;
        report.checks.push_back(
            {"sentence " + std::to_string(s) + " transports", false, static_cast<int>(m), {}});
        return report;
      }
    }
    report.checks.push_back({"sentence " + std::to_string(s) + " transports", true, -1, {}});
  }
  return report;
}

FiniteModel applyToModel(const Interpretation& interp, const FiniteModel& targetModel) {
  if (!satisfiesTheory(targetModel, interp.targetTheory).allHold())
    throw Error("applyToModel requires a model of the target theory");
  InterpretedSort fiber = interpretSortInModel(interp.homSortImage, targetModel);
  FiniteModel out;
  out.size = fiber.carrier.size;
  for (size_t r = 0; r < interp.sourceLanguage.relations.size(); ++r) {
    const RelationSymbol& rel = interp.sourceLanguage.relations[r];
    auto classes = interpretRelationClassesImpl(interp.relationImages[r], interp.homSortImage,
                                                fiber, rel.arity);
    FiniteModel::Table table{rel.name, rel.arity,
                             std::vector<std::vector<int>>(classes.begin(), classes.end())};
    out.tables.push_back(std::move(table));
  }
  out.normalize();
  return out;
}

std::vector<int> applyToIso(const Interpretation& interp, const FiniteModel& source,
                            const FiniteModel& target, const std::vector<int>& permutation) {
  CodedMap transported =
      transportAlongIso(interp.homSortImage, source, target, permutation);
  return transported.values;
}

ComposedInterpretation composeInterpretations(const Interpretation& g, const Interpretation& f,
                                              int cap) {
  if (!(f.targetLanguage.relations == g.sourceLanguage.relations))
    throw Error("composeInterpretations: middle languages differ");
  ComposedInterpretation out;
  Interpretation& composite = out.interpretation;
  composite.sourceLanguage = f.sourceLanguage;
  composite.sourceTheory = f.sourceTheory;
  composite.targetLanguage = g.targetLanguage;
  composite.targetTheory = g.targetTheory;
  composite.mode = (f.mode == LogicMode::Boolean || g.mode == LogicMode::Boolean)
                       ? LogicMode::Boolean
                       : LogicMode::Coherent;
  // A coherent functor between Boolean pretoposes preserves the complements
  // it meets, so translation during composition runs at the joined mode.
  Interpretation gEff = g;
  gEff.mode = composite.mode;

  const ImaginarySort& a = f.homSortImage;  // over the middle language
  const ImaginarySort& b = g.homSortImage;  // over the final target language

  // Composite piece directory: (source piece i, tuple of b-piece indices).
  struct CompositePiece {
    int i;
    std::vector<int> js;
  };
  std::vector<CompositePiece> directory;
  std::vector<DefinableRelation> translatedPieces;  // G(alpha_i) on powerSort(b, n_i)
  for (int i = 0; i < a.pieceCount(); ++i)
    translatedPieces.push_back(translateFormulaAlong(gEff, a.pieces[i]));
  for (int i = 0; i < a.pieceCount(); ++i) {
    const int ni = a.arity(i);
    const int flatCount = static_cast<int>(translatedPieces[i].pieces.size());
    for (int flat = 0; flat < flatCount; ++flat)
      directory.push_back({i, powerPieceIndex(b, ni, flat)});
  }

  ImaginarySort& c = composite.homSortImage;
  for (const CompositePiece& piece : directory) {
    int flat = powerPieceFlat(b, static_cast<int>(piece.js.size()), piece.js);
    c.pieces.push_back(translatedPieces[piece.i].pieces[flat]);
  }
  c.relations.resize(c.pieces.size());
  std::vector<std::vector<DefinableRelation>> translatedEps(a.pieceCount());
  for (int i = 0; i < a.pieceCount(); ++i)
    for (int j = 0; j < a.pieceCount(); ++j)
      translatedEps[i].push_back(translateFormulaAlong(gEff, a.relations[i][j]));
  for (size_t p = 0; p < directory.size(); ++p)
    for (size_t q = 0; q < directory.size(); ++q) {
      std::vector<int> combined = directory[p].js;
      combined.insert(combined.end(), directory[q].js.begin(), directory[q].js.end());
      int flat = powerPieceFlat(b, static_cast<int>(combined.size()), combined);
      c.relations[p].push_back(translatedEps[directory[p].i][directory[q].i].pieces[flat]);
    }

  // Relation images: push each F(R) piece through G, regrouping the power
  // indexing over the composite pieces.
  for (size_t r = 0; r < f.sourceLanguage.relations.size(); ++r) {
    const RelationSymbol& rel = f.sourceLanguage.relations[r];
    const DefinableRelation& image = f.relationImages[r];
    DefinableRelation composed;
    composed.sort = powerSort(c, rel.arity);
    std::vector<DefinableRelation> translatedImages;
    for (const Formula& piece : image.pieces)
      translatedImages.push_back(translateFormulaAlong(gEff, piece));
    const int pieceCount = composed.sort.pieceCount();
    for (int p = 0; p < pieceCount; ++p) {
      std::vector<int> cIdx = powerPieceIndex(c, rel.arity, p);
      std::vector<int> is;
      std::vector<int> combined;
      for (int t = 0; t < rel.arity; ++t) {
        is.push_back(directory[cIdx[t]].i);
        combined.insert(combined.end(), directory[cIdx[t]].js.begin(),
                        directory[cIdx[t]].js.end());
      }
      int sourceFlat = powerPieceFlat(a, rel.arity, is);
      int targetFlat = powerPieceFlat(b, static_cast<int>(combined.size()), combined);
      composed.pieces.push_back(translatedImages[sourceFlat].pieces[targetFlat]);
    }
    composite.relationImages.push_back(std::move(composed));
  }

  // Zeta components: lift composite classes through the middle model and
  // verify the carrier bijections are source-structure isomorphisms.
  out.targetModels = enumerateModels(g.targetLanguage, g.targetTheory, cap);
  for (const FiniteModel& model : out.targetModels) {
    InterpretedSort fiberB = interpretSortInModel(b, model);
    FiniteModel middle = applyToModel(g, model);
    InterpretedSort fiberA = interpretSortInModel(a, middle);
    InterpretedSort fiberC = interpretSortInModel(c, model);

    CodedMap zeta;
    zeta.sourceSize = fiberC.carrier.size;
    zeta.targetSize = fiberA.carrier.size;
    zeta.values.assign(fiberC.carrier.size, -1);
    for (const auto& [element, cls] : fiberC.classOf) {
      const CompositePiece& piece = directory[element.first];
      std::vector<int> middleTuple;
      int offset = 0;
      for (int t = 0; t < static_cast<int>(piece.js.size()); ++t) {
        const int len = b.arity(piece.js[t]);
        std::vector<int> block(element.second.begin() + offset,
                               element.second.begin() + offset + len);
        offset += len;
        middleTuple.push_back(fiberB.classIndex(piece.js[t], block));
      }
      int target = fiberA.classIndex(piece.i, middleTuple);
      if (zeta.values[cls] != -1 && zeta.values[cls] != target)
        throw Error("composeInterpretations: zeta component is representative-dependent");
      zeta.values[cls] = target;
    }
    if (!zeta.isBijection())
      throw Error("composeInterpretations: zeta component is not a bijection");

    // Structure preservation: zeta carries the composite's transported tables
    // to F-after-G's.
    FiniteModel viaComposite = applyToModel(composite, model);
    FiniteModel viaSteps = applyToModel(f, middle);
    for (size_t t = 0; t < viaComposite.tables.size(); ++t) {
      for (const std::vector<int>& tuple : viaComposite.tables[t].tuples) {
        std::vector<int> image;
        for (int v : tuple) image.push_back(zeta.values[v]);
        if (!std::binary_search(viaSteps.tables[t].tuples.begin(),
                                viaSteps.tables[t].tuples.end(), image))
          throw Error("composeInterpretations: zeta is not a structure isomorphism");
      }
      if (viaComposite.tables[t].tuples.size() != viaSteps.tables[t].tuples.size())
        throw Error("composeInterpretations: zeta is not a structure isomorphism");
    }
    out.zeta.push_back(std::move(zeta));
  }
  return out;
}

SequenceSortEmbedding sequenceSortEmbedding(const ImaginarySort& sort) {
  SequenceSortEmbedding out;
  int previous = -1;
  for (int i = 0; i < sort.pieceCount(); ++i) {
    int padded = std::max(sort.arity(i), previous + 1);
    if (padded > sort.arity(i) && sort.arity(i) == 0)
      throw Error("sequenceSortEmbedding: an arity-0 piece cannot be padded diagonally "
                  "(the empty model has no diagonal image)");
    out.paddedArities.push_back(padded);
    previous = padded;
  }
  ImaginarySort& emb = out.embedded;
  for (int i = 0; i < sort.pieceCount(); ++i) {
    const int ni = sort.arity(i);
    const int mi = out.paddedArities[i];
    std::vector<Formula> parts = {embed(sort.pieces[i], 0, mi)};
    for (int t = ni; t < mi; ++t) parts.push_back(Formula::eq(ni - 1, t, mi));
    emb.pieces.push_back(Formula::conj(mi, std::move(parts)));
  }
  emb.relations.resize(emb.pieces.size());
  for (int i = 0; i < sort.pieceCount(); ++i) {
    const int ni = sort.arity(i), mi = out.paddedArities[i];
    for (int j = 0; j < sort.pieceCount(); ++j) {
      const int nj = sort.arity(j), mj = out.paddedArities[j];
      const int ctx = mi + mj;
      std::vector<int> map;
      for (int t = 0; t < ni; ++t) map.push_back(t);
      for (int t = 0; t < nj; ++t) map.push_back(mi + t);
      Formula eps = substituteVariables(sort.relations[i][j], map, ctx);
      emb.relations[i].push_back(Formula::conj(
          ctx, {embed(emb.pieces[i], 0, ctx), embed(emb.pieces[j], mi, ctx), eps}));
    }
  }
  return out;
}

CodedMap sequenceEmbeddingBijection(const ImaginarySort& sort, const SequenceSortEmbedding& emb,
                                    const FiniteModel& model) {
  InterpretedSort from = interpretSortInModel(sort, model);
  InterpretedSort to = interpretSortInModel(emb.embedded, model);
  CodedMap out;
  out.sourceSize = from.carrier.size;
  out.targetSize = to.carrier.size;
  out.values.assign(from.carrier.size, -1);
  for (const auto& [element, cls] : from.classOf) {
    const int ni = sort.arity(element.first);
    const int mi = emb.paddedArities[element.first];
    std::vector<int> padded = element.second;
    for (int t = ni; t < mi; ++t) padded.push_back(element.second[ni - 1]);
    int target = to.classIndex(element.first, padded);
    if (out.values[cls] != -1 && out.values[cls] != target)
      throw Error("sequenceEmbeddingBijection: representative-dependent image");
    out.values[cls] = target;
  }
  if (!out.isBijection()) throw Error("sequenceEmbeddingBijection: not a bijection");
  return out;
}

Interpretation fromHMMData(const HMMData& data, const Language& sourceLanguage,
                           const Theory& sourceTheory, const Language& targetLanguage,
                           const Theory& targetTheory, int cap) {
  for (size_t i = 1; i < data.domainPieces.size(); ++i)
    if (data.domainPieces[i].contextSize() <= data.domainPieces[i - 1].contextSize())
      throw Error("fromHMMData: domain pieces must have strictly increasing arities");

  Interpretation interp;
  interp.sourceLanguage = sourceLanguage;
  interp.sourceTheory = sourceTheory;
  interp.targetLanguage = targetLanguage;
  interp.targetTheory = targetTheory;
  interp.homSortImage.pieces = data.domainPieces;
  interp.homSortImage.relations = data.domainEquivalence;

  ValidationReport sortReport = validateSort(interp.homSortImage, targetLanguage, targetTheory, cap);
  if (!sortReport.valid)
    throw Error("fromHMMData: the equivalence data fails the schema (clause " +
                sortReport.witness->clause + ")");

  if (data.relationImages.size() != sourceLanguage.relations.size())
    throw Error("fromHMMData: one relation image per source relation is required");
  for (size_t r = 0; r < sourceLanguage.relations.size(); ++r) {
    const RelationSymbol& rel = sourceLanguage.relations[r];
    DefinableRelation image;
    image.sort = powerSort(interp.homSortImage, rel.arity);
    const int pieceCount = image.sort.pieceCount();
    if (static_cast<int>(data.relationImages[r].size()) != pieceCount)
      throw Error("fromHMMData: relation image for " + rel.name + " has the wrong piece count");
    for (int p = 0; p < pieceCount; ++p) {
      if (data.relationImages[r][p].size() != 1)
        throw Error("fromHMMData: relation image pieces must be single formulas");
      image.pieces.push_back(data.relationImages[r][p][0]);
    }
    ValidationReport relReport = validateRelation(image, targetLanguage, targetTheory, cap);
    if (!relReport.valid)
      throw Error("fromHMMData: relation image for " + rel.name +
                  " is not invariant (clause " + relReport.witness->clause + ")");
    interp.relationImages.push_back(std::move(image));
  }

  InterpretationReport report = validateInterpretation(interp, cap);
  if (!report.valid) throw Error("fromHMMData: the interpretation fails validation");
  return interp;
}

namespace {

// Coherent candidate formulas over the language with the given context, up to
// a small depth: atoms, equalities, conjunctions of two atoms, one
// existential over an atom.
std::vector<Formula> candidateFormulas(const Language& language, int context, int depth) {
  std::vector<Formula> out;
  out.push_back(Formula::top(context));
  std::vector<Formula> atoms;
  for (const RelationSymbol& r : language.relations) {
    std::vector<std::vector<int>> tuples = {{}};
    for (int i = 0; i < r.arity; ++i) {
      std::vector<std::vector<int>> next;
      for (const std::vector<int>& t : tuples)
        for (int v = 0; v < context; ++v) {
          std::vector<int> e = t;
          e.push_back(v);
          next.push_back(std::move(e));
        }
      tuples = std::move(next);
    }
    if (r.arity > 0 && context == 0) continue;
    for (const std::vector<int>& t : tuples) atoms.push_back(Formula::atom(r.name, t, context));
  }
  for (int i = 0; i < context; ++i)
    for (int j = i + 1; j < context; ++j) atoms.push_back(Formula::eq(i, j, context));
  out.insert(out.end(), atoms.begin(), atoms.end());
  if (depth >= 2) {
    for (size_t i = 0; i < atoms.size(); ++i)
      for (size_t j = i + 1; j < atoms.size(); ++j)
        out.push_back(Formula::conj(context, {atoms[i], atoms[j]}));
    for (size_t i = 0; i < atoms.size(); ++i)
      for (size_t j = i + 1; j < atoms.size(); ++j)
        out.push_back(Formula::disj(context, {atoms[i], atoms[j]}));
  }
  return out;
}

} // namespace

SearchResult searchInterpretation(const FunctorTable& table, const Language& sourceLanguage,
                                  const Theory& sourceTheory, const GroupoidSlice& targetSlice,
                                  const SearchOptions& options) {
  SearchResult result;
  if (table.objectImages.size() != targetSlice.models.size())
    throw Error("searchInterpretation: table does not match the slice");

  for (int ctx = 1; ctx <= options.maxHomContext; ++ctx) {
    std::vector<Formula> homCandidates =
        candidateFormulas(targetSlice.language, ctx, options.maxFormulaDepth);
    for (const Formula& alpha : homCandidates) {
      Interpretation interp;
      interp.sourceLanguage = sourceLanguage;
      interp.sourceTheory = sourceTheory;
      interp.targetLanguage = targetSlice.language;
      interp.targetTheory = targetSlice.theory;
      interp.homSortImage = sortFromFormula(alpha);

      // Per-relation candidate pools over the needed contexts.
      std::vector<std::vector<Formula>> pools;
      bool feasible = true;
      for (const RelationSymbol& r : sourceLanguage.relations) {
        std::vector<Formula> pool =
            candidateFormulas(targetSlice.language, ctx * r.arity, options.maxFormulaDepth);
        if (pool.empty()) feasible = false;
        pools.push_back(std::move(pool));
      }
      if (!feasible) continue;

      std::vector<size_t> choice(pools.size(), 0);
      bool done = pools.empty();
      while (true) {
        if (++result.candidatesTried > options.maxCandidates) return result;
        interp.relationImages.clear();
        for (size_t r = 0; r < pools.size(); ++r) {
          DefinableRelation rel;
          rel.sort = powerSort(interp.homSortImage, sourceLanguage.relations[r].arity);
          rel.pieces = {pools[r][choice[r]]};
          interp.relationImages.push_back(std::move(rel));
        }
        bool matches = true;
        try {
          if (!validateInterpretation(interp, targetSlice.cap).valid) matches = false;
          if (matches) {
            for (size_t m = 0; m < targetSlice.models.size() && matches; ++m) {
              FiniteModel transported = applyToModel(interp, targetSlice.models[m]);
              if (!(transported == table.objectImages[m])) matches = false;
            }
          }
          if (matches) {
            for (size_t g = 0; g < targetSlice.morphisms.size() && matches; ++g) {
              const Isomorphism& iso = targetSlice.morphisms[g];
              std::vector<int> transported =
                  applyToIso(interp, targetSlice.models[iso.sourceIndex],
                             targetSlice.models[iso.targetIndex], iso.permutation);
              if (transported != table.morphismImages[g]) matches = false;
            }
          }
        } catch (const Error&) {
          matches = false;
        }
        if (matches) {
          result.found = true;
          result.interpretation = interp;
          return result;
        }
        if (done) break;
        // advance the mixed-radix choice vector
        size_t pos = 0;
        while (pos < choice.size()) {
          if (++choice[pos] < pools[pos].size()) break;
          choice[pos] = 0;
          ++pos;
        }
        if (pos == choice.size()) break;
      }
    }
  }
  return result;
}

} // namespace ilwb
