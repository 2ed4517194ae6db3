#include "ilwb/json_io.hpp"

#include <sstream>

#include "ilwb/errors.hpp"

namespace ilwb {

Json modelToJson(const FiniteModel& model) {
  Json j;
  j["size"] = model.size;
  Json relations = Json::object();
  for (const FiniteModel::Table& t : model.tables) {
    Json tuples = Json::array();
    for (const std::vector<int>& tuple : t.tuples) tuples.push_back(tuple);
    relations[t.relation] = tuples;
  }
  j["relations"] = relations;
  return j;
}

FiniteModel modelFromJson(const Json& j, const Language& language) {
  if (!j.contains("size") || !j["size"].is_number_integer())
    throw Error("model JSON needs an integer \"size\"");
  FiniteModel model = FiniteModel::empty(language, j["size"].get<int>());
  if (model.size < 0) throw Error("model size must be nonnegative");
  const Json& relations = j.value("relations", Json::object());
  for (const auto& [name, tuples] : relations.items()) {
    FiniteModel::Table* table = model.find(name);
    if (!table) throw LanguageMismatch("model JSON mentions unknown relation " + name);
    for (const Json& tuple : tuples) {
      std::vector<int> t = tuple.get<std::vector<int>>();
      if (static_cast<int>(t.size()) != table->arity)
        throw Error("tuple arity mismatch for relation " + name);
      for (int v : t)
        if (v < 0 || v >= model.size) throw Error("tuple entry out of the universe");
      table->tuples.push_back(std::move(t));
    }
  }
  model.normalize();
  return model;
}

Json modelSetToJson(const std::vector<FiniteModel>& models) {
  Json j = Json::array();
  for (const FiniteModel& m : models) j.push_back(modelToJson(m));
  return j;
}

Json tupleSetToJson(const TupleSet& set) {
  Json j;
  j["arity"] = set.arity();
  j["universe"] = set.universe();
  Json tuples = Json::array();
  for (const std::vector<int>& t : set.tuples()) tuples.push_back(t);
  j["tuples"] = tuples;
  return j;
}

Json formulaToJson(const Formula& f) {
  Json j;
  j["context"] = f.contextSize();
  j["formula"] = printFormula(f);
  return j;
}

Formula formulaFromJson(const Json& j, const Language& language) {
  int context = j.at("context").get<int>();
  return parseFormula(j.at("formula").get<std::string>(), defaultNames(context), language);
}

Json sortToJson(const ImaginarySort& sort) {
  Json j;
  Json pieces = Json::array();
  for (const Formula& p : sort.pieces) pieces.push_back(formulaToJson(p));
  j["pieces"] = pieces;
  Json relations = Json::array();  // row-major
  for (const auto& row : sort.relations)
    for (const Formula& r : row) relations.push_back(formulaToJson(r));
  j["relations"] = relations;
  return j;
}

ImaginarySort sortFromJson(const Json& j, const Language& language) {
  ImaginarySort sort;
  for (const Json& p : j.at("pieces")) sort.pieces.push_back(formulaFromJson(p, language));
  const Json& relations = j.at("relations");
  const size_t n = sort.pieces.size();
  if (relations.size() != n * n) throw Error("sort JSON relation matrix has the wrong size");
  sort.relations.resize(n);
  size_t idx = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      sort.relations[i].push_back(formulaFromJson(relations[idx++], language));
  return sort;
}

Json relationToJson(const DefinableRelation& relation) {
  Json j;
  j["sort"] = sortToJson(relation.sort);
  Json pieces = Json::array();
  for (const Formula& p : relation.pieces) pieces.push_back(formulaToJson(p));
  j["pieces"] = pieces;
  return j;
}

Json functionToJson(const DefinableFunction& fn) {
  Json j;
  j["source"] = sortToJson(fn.source);
  j["target"] = sortToJson(fn.target);
  Json graph = Json::array();  // row-major
  for (const auto& row : fn.graph)
    for (const Formula& g : row) graph.push_back(formulaToJson(g));
  j["graph"] = graph;
  return j;
}

Json interpretedSortToJson(const InterpretedSort& fiber) {
  Json j;
  j["carrier"] = fiber.carrier.size;
  Json classes = Json::object();
  for (const auto& [element, cls] : fiber.classOf) {
    std::ostringstream key;
    key << element.first << ":";
    for (size_t i = 0; i < element.second.size(); ++i) {
      if (i) key << ",";
      key << element.second[i];
    }
    classes[key.str()] = cls;
  }
  j["classes"] = classes;
  return j;
}

Json sliceToJson(const GroupoidSlice& slice) {
  Json j;
  j["cap"] = slice.cap;
  j["objects"] = modelSetToJson(slice.models);
  Json morphisms = Json::array();
  for (const Isomorphism& iso : slice.morphisms)
    morphisms.push_back(Json::array({iso.sourceIndex, iso.targetIndex, iso.permutation}));
  j["morphisms"] = morphisms;
  return j;
}

Json fiberedSortToJson(const FiberedSort& fs) {
  Json j;
  j["sort"] = sortToJson(fs.sort);
  Json fibers = Json::array();
  for (const InterpretedSort& f : fs.fibers) fibers.push_back(interpretedSortToJson(f));
  j["fibers"] = fibers;
  Json action = Json::array();
  for (const CodedMap& a : fs.action) action.push_back(a.values);
  j["action"] = action;
  return j;
}

Json interpretationToJson(const Interpretation& interp) {
  Json j;
  Theory source = interp.sourceTheory;
  source.language = interp.sourceLanguage;
  Theory target = interp.targetTheory;
  target.language = interp.targetLanguage;
  j["sourceTheory"] = printTheory(source);
  j["targetTheory"] = printTheory(target);
  j["mode"] = interp.mode == LogicMode::Boolean ? "boolean" : "coherent";
  j["homSortImage"] = sortToJson(interp.homSortImage);
  Json images = Json::array();
  for (const DefinableRelation& r : interp.relationImages) {
    Json image = Json::array();
    for (const Formula& p : r.pieces) image.push_back(formulaToJson(p));
    images.push_back(image);
  }
  j["relationImages"] = images;
  return j;
}

Interpretation interpretationFromJson(const Json& j) {
  Interpretation interp;
  auto [sourceLang, sourceThy] = parseTheory(j.at("sourceTheory").get<std::string>());
  auto [targetLang, targetThy] = parseTheory(j.at("targetTheory").get<std::string>());
  interp.sourceLanguage = sourceLang;
  interp.sourceTheory = sourceThy;
  interp.targetLanguage = targetLang;
  interp.targetTheory = targetThy;
  interp.mode = j.value("mode", "coherent") == "boolean" ? LogicMode::Boolean
                                                         : LogicMode::Coherent;
  interp.homSortImage = sortFromJson(j.at("homSortImage"), targetLang);
  const Json& images = j.at("relationImages");
  if (images.size() != sourceLang.relations.size())
    throw Error("interpretation JSON needs one relation image per source relation");
  for (size_t r = 0; r < images.size(); ++r) {
    DefinableRelation rel;
    rel.sort = powerSort(interp.homSortImage, sourceLang.relations[r].arity);
    for (const Json& p : images[r]) rel.pieces.push_back(formulaFromJson(p, targetLang));
    if (rel.pieces.size() != static_cast<size_t>(rel.sort.pieceCount()))
      throw Error("relation image piece count mismatch for " + sourceLang.relations[r].name);
    interp.relationImages.push_back(std::move(rel));
  }
  return interp;
}

Json descriptorToJson(const BorelDescriptor::Ptr& d) {
  Json j;
  switch (d->kind) {
    case BorelDescriptor::Kind::Leaf:
      j["kind"] = "leaf";
      j["pointArity"] = d->leaf.pointArity;
      j["section"] = d->leaf.section;
      j["guard"] = printFormula(d->leaf.guard);
      j["guardContext"] = d->leaf.guard.contextSize();
      j["guardArgs"] = d->leaf.guardArgs;
      break;
    case BorelDescriptor::Kind::Union: {
      j["kind"] = "union";
      j["pointArity"] = d->pointArity();
      Json children = Json::array();
      for (const BorelDescriptor::Ptr& c : d->children) children.push_back(descriptorToJson(c));
      j["children"] = children;
      break;
    }
    case BorelDescriptor::Kind::Complement:
      j["kind"] = "complement";
      j["child"] = descriptorToJson(d->children[0]);
      break;
  }
  return j;
}

BorelDescriptor::Ptr descriptorFromJson(const Json& j, const Language& language) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    BasicOpen open;
    open.pointArity = j.at("pointArity").get<int>();
    open.section = j.at("section").get<std::vector<int>>();
    int guardContext = j.at("guardContext").get<int>();
    open.guard =
        parseFormula(j.at("guard").get<std::string>(), defaultNames(guardContext), language);
    open.guardArgs = j.at("guardArgs").get<std::vector<int>>();
    return BorelDescriptor::mkLeaf(std::move(open));
  }
  if (kind == "union") {
    std::vector<BorelDescriptor::Ptr> children;
    for (const Json& c : j.at("children")) children.push_back(descriptorFromJson(c, language));
    return BorelDescriptor::mkUnion(std::move(children), j.at("pointArity").get<int>());
  }
  if (kind == "complement")
    return BorelDescriptor::mkComplement(descriptorFromJson(j.at("child"), language));
  throw Error("unknown descriptor kind " + kind);
}

Json morleyMapToJson(const MorleyResult& result) {
  Json j = Json::object();
  for (const auto& [formula, relation] : result.formulaIndex) {
    Json entry;
    entry["context"] = formula.contextSize();
    entry["formula"] = printFormula(formula);
    j[relation.name] = entry;
  }
  return j;
}

} // namespace ilwb
