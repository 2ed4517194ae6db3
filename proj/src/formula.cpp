#include "ilwb/syntax.hpp"

#include <algorithm>
#include <cassert>

namespace ilwb {

struct Formula::Node {
  FormulaKind kind;
  int context = 0;
  std::string relation;
  std::vector<int> args;
  std::vector<Formula> parts;
  size_t hash = 0;
  int depth = 1;
};

namespace {

size_t combine(size_t seed, size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

size_t computeHash(const Formula::Node& n) {
  size_t h = combine(static_cast<size_t>(n.kind) * 0x100000001b3ULL, static_cast<size_t>(n.context));
  h = combine(h, std::hash<std::string>{}(n.relation));
  for (int a : n.args) h = combine(h, static_cast<size_t>(a) + 1);
  for (const Formula& p : n.parts) h = combine(h, p.hash());
  return h;
}

std::shared_ptr<const Formula::Node> finish(Formula::Node node) {
  node.hash = computeHash(node);
  int d = 1;
  for (const Formula& p : node.parts) d = std::max(d, p.depth() + 1);
  node.depth = d;
  return std::make_shared<const Formula::Node>(std::move(node));
}

} // namespace

Formula Formula::atom(std::string relation, std::vector<int> args, int contextSize) {
  for (int a : args)
    if (a < 0 || a >= contextSize) throw Error("atom argument index out of context");
  Node n;
  n.kind = FormulaKind::Atom;
  n.context = contextSize;
  n.relation = std::move(relation);
  n.args = std::move(args);
  return Formula(finish(std::move(n)));
}

Formula Formula::eq(int i, int j, int contextSize) {
  if (i < 0 || j < 0 || i >= contextSize || j >= contextSize)
    throw Error("equality index out of context");
  Node n;
  n.kind = FormulaKind::Eq;
  n.context = contextSize;
  n.args = {std::min(i, j), std::max(i, j)};
  return Formula(finish(std::move(n)));
}

Formula Formula::top(int contextSize) {
  Node n;
  n.kind = FormulaKind::True;
  n.context = contextSize;
  return Formula(finish(std::move(n)));
}

Formula Formula::bottom(int contextSize) {
  Node n;
  n.kind = FormulaKind::False;
  n.context = contextSize;
  return Formula(finish(std::move(n)));
}

Formula Formula::conj(int contextSize, std::vector<Formula> parts) {
  if (parts.empty()) return top(contextSize);
  for (const Formula& p : parts)
    if (p.contextSize() != contextSize) throw Error("conjunction members disagree on context size");
  Node n;
  n.kind = FormulaKind::And;
  n.context = contextSize;
  n.parts = std::move(parts);
  return Formula(finish(std::move(n)));
}

Formula Formula::disj(int contextSize, std::vector<Formula> parts) {
  if (parts.empty()) return bottom(contextSize);
  for (const Formula& p : parts)
    if (p.contextSize() != contextSize) throw Error("disjunction members disagree on context size");
  Node n;
  n.kind = FormulaKind::Or;
  n.context = contextSize;
  n.parts = std::move(parts);
  return Formula(finish(std::move(n)));
}

Formula Formula::negation(Formula part) {
  Node n;
  n.kind = FormulaKind::Not;
  n.context = part.contextSize();
  n.parts = {std::move(part)};
  return Formula(finish(std::move(n)));
}

Formula Formula::exists(Formula body) {
  if (body.contextSize() < 1) throw Error("exists body must have at least one variable");
  Node n;
  n.kind = FormulaKind::Exists;
  n.context = body.contextSize() - 1;
  n.parts = {std::move(body)};
  return Formula(finish(std::move(n)));
}

Formula Formula::forall(Formula body) {
  if (body.contextSize() < 1) throw Error("forall body must have at least one variable");
  Node n;
  n.kind = FormulaKind::Forall;
  n.context = body.contextSize() - 1;
  n.parts = {std::move(body)};
  return Formula(finish(std::move(n)));
}

Formula Formula::existsMany(int count, Formula body) {
  Formula f = std::move(body);
  for (int i = 0; i < count; ++i) f = exists(std::move(f));
  return f;
}

Formula Formula::forallMany(int count, Formula body) {
  Formula f = std::move(body);
  for (int i = 0; i < count; ++i) f = forall(std::move(f));
  return f;
}

int Formula::contextSize() const { return node_->context; }
FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::relation() const { return node_->relation; }
const std::vector<int>& Formula::args() const { return node_->args; }
const std::vector<Formula>& Formula::parts() const { return node_->parts; }
const Formula& Formula::child() const { return node_->parts.at(0); }
size_t Formula::hash() const { return node_->hash; }
int Formula::depth() const { return node_->depth; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.hash != b.hash || a.kind != b.kind || a.context != b.context) return false;
  if (a.relation != b.relation || a.args != b.args) return false;
  if (a.parts.size() != b.parts.size()) return false;
  for (size_t i = 0; i < a.parts.size(); ++i)
    if (!(a.parts[i] == b.parts[i])) return false;
  return true;
}

bool Formula::operator<(const Formula& other) const {
  if (node_ == other.node_) return false;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.context != b.context) return a.context < b.context;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.relation != b.relation) return a.relation < b.relation;
  if (a.args != b.args) return a.args < b.args;
  if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size();
  for (size_t i = 0; i < a.parts.size(); ++i) {
    if (a.parts[i] < b.parts[i]) return true;
    if (b.parts[i] < a.parts[i]) return false;
  }
  return false;
}

const RelationSymbol* Language::find(const std::string& name) const {
  for (const RelationSymbol& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

int Language::indexOf(const std::string& name) const {
  for (size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name == name) return static_cast<int>(i);
  return -1;
}

bool isCoherent(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::And:
    case FormulaKind::Or:
      for (const Formula& p : f.parts())
        if (!isCoherent(p)) return false;
      return true;
    case FormulaKind::Exists:
      return isCoherent(f.child());
    case FormulaKind::Not:
    case FormulaKind::Forall:
      return false;
  }
  return false;
}

Formula substituteVariables(const Formula& f, const std::vector<int>& map, int newContextSize) {
  if (static_cast<int>(map.size()) != f.contextSize())
    throw Error("substitution map does not cover the context");
  for (int image : map)
    if (image < 0 || image >= newContextSize) throw Error("substitution image index out of range");
  if (newContextSize == f.contextSize()) {
    bool identity = true;
    for (size_t i = 0; i < map.size(); ++i)
      if (map[i] != static_cast<int>(i)) identity = false;
    if (identity) return f;
  }

  switch (f.kind()) {
    case FormulaKind::Atom: {
      std::vector<int> args;
      args.reserve(f.args().size());
      for (int a : f.args()) args.push_back(map[a]);
      return Formula::atom(f.relation(), std::move(args), newContextSize);
    }
    case FormulaKind::Eq:
      return Formula::eq(map[f.args()[0]], map[f.args()[1]], newContextSize);
    case FormulaKind::True:
      return Formula::top(newContextSize);
    case FormulaKind::False:
      return Formula::bottom(newContextSize);
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.parts().size());
      for (const Formula& p : f.parts()) parts.push_back(substituteVariables(p, map, newContextSize));
      return f.kind() == FormulaKind::And ? Formula::conj(newContextSize, std::move(parts))
                                          : Formula::disj(newContextSize, std::move(parts));
    }
    case FormulaKind::Not:
      return Formula::negation(substituteVariables(f.child(), map, newContextSize));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<int> extended = map;
      extended.push_back(newContextSize);  // the bound slot stays on top
      Formula body = substituteVariables(f.child(), extended, newContextSize + 1);
      return f.kind() == FormulaKind::Exists ? Formula::exists(std::move(body))
                                             : Formula::forall(std::move(body));
    }
  }
  throw Error("unreachable");
}

namespace {

// A normal-form block: quantifierCount existentials over a conjunction of
// atomic/equality literals at context (free + quantifierCount).
struct Block {
  int quantifiers = 0;
  std::vector<Formula> literals;  // context = free + quantifiers
};

// Reindex a block's literals from context free+q into free+total, keeping the
// block's own bound variables at offset..offset+q-1.
std::vector<Formula> shiftLiterals(const std::vector<Formula>& literals, int free, int q,
                                   int offset, int total) {
  std::vector<int> map(free + q);
  for (int i = 0; i < free; ++i) map[i] = i;
  for (int i = 0; i < q; ++i) map[free + i] = offset + i;
  std::vector<Formula> out;
  out.reserve(literals.size());
  for (const Formula& lit : literals) out.push_back(substituteVariables(lit, map, total));
  return out;
}

std::vector<Block> toBlocks(const Formula& f) {
  const int n = f.contextSize();
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
      return {Block{0, {f}}};
    case FormulaKind::True:
      return {Block{0, {}}};
    case FormulaKind::False:
      return {};
    case FormulaKind::Or: {
      std::vector<Block> out;
      for (const Formula& p : f.parts()) {
        std::vector<Block> sub = toBlocks(p);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    case FormulaKind::And: {
      std::vector<Block> acc = {Block{0, {}}};
      for (const Formula& p : f.parts()) {
        std::vector<Block> sub = toBlocks(p);
        std::vector<Block> next;
        for (const Block& a : acc)
          for (const Block& b : sub) {
            Block merged;
            merged.quantifiers = a.quantifiers + b.quantifiers;
            int total = n + merged.quantifiers;
            merged.literals = shiftLiterals(a.literals, n, a.quantifiers, n, total);
            std::vector<Formula> rhs =
                shiftLiterals(b.literals, n, b.quantifiers, n + a.quantifiers, total);
            merged.literals.insert(merged.literals.end(), rhs.begin(), rhs.end());
            next.push_back(std::move(merged));
          }
        acc = std::move(next);
      }
      return acc;
    }
    case FormulaKind::Exists: {
      std::vector<Block> sub = toBlocks(f.child());
      // The child's free context is n+1; its top free slot becomes one more
      // bound variable here.  Indices already line up: the child's slot n sits
      // below its own quantifiers, exactly where this block wants it.
      for (Block& b : sub) b.quantifiers += 1;
      return sub;
    }
    case FormulaKind::Not:
    case FormulaKind::Forall:
      throw Error("coherentNormalForm requires a coherent formula");
  }
  throw Error("unreachable");
}

} // namespace

Formula coherentNormalForm(const Formula& f) {
  if (!isCoherent(f)) throw Error("coherentNormalForm requires a coherent formula");
  const int n = f.contextSize();
  std::vector<Formula> disjuncts;
  for (const Block& b : toBlocks(f)) {
    Formula body = Formula::conj(n + b.quantifiers, b.literals);
    disjuncts.push_back(Formula::existsMany(b.quantifiers, body));
  }
  return Formula::disj(n, std::move(disjuncts));
}

Formula SubstitutionCache::apply(const Formula& f, const std::vector<int>& map,
                                 int newContextSize) {
  if (static_cast<int>(map.size()) != f.contextSize())
    throw Error("substitution map does not cover the context");
  if (newContextSize == f.contextSize()) {
    bool identity = true;
    for (size_t i = 0; i < map.size(); ++i)
      if (map[i] != static_cast<int>(i)) identity = false;
    if (identity) return f;
  }
  auto key = std::make_tuple(f.id(), map, newContextSize);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second.second;

  Formula result;
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Eq:
    case FormulaKind::True:
    case FormulaKind::False:
      result = substituteVariables(f, map, newContextSize);
      break;
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.parts().size());
      for (const Formula& p : f.parts()) parts.push_back(apply(p, map, newContextSize));
      result = f.kind() == FormulaKind::And ? Formula::conj(newContextSize, std::move(parts))
                                            : Formula::disj(newContextSize, std::move(parts));
      break;
    }
    case FormulaKind::Not:
      result = Formula::negation(apply(f.child(), map, newContextSize));
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<int> extended = map;
      extended.push_back(newContextSize);
      Formula body = apply(f.child(), extended, newContextSize + 1);
      result = f.kind() == FormulaKind::Exists ? Formula::exists(std::move(body))
                                               : Formula::forall(std::move(body));
      break;
    }
  }
  memo_.emplace(std::move(key), std::make_pair(f, result));
  return result;
}

Formula axiomSentence(const CoherentAxiom& axiom) {
  Formula body = Formula::disj(axiom.contextSize, {Formula::negation(axiom.lhs), axiom.rhs});
  return Formula::forallMany(axiom.contextSize, body);
}

namespace {

void closeOver(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  for (const Formula& p : f.parts()) closeOver(p, out);
  switch (f.kind()) {
    case FormulaKind::And:
      // The (Mor) conjunction clause needs the negated conjuncts.
      for (const Formula& p : f.parts()) closeOver(Formula::negation(p), out);
      break;
    case FormulaKind::Forall:
      // forall is Morleyized through its not-exists-not partner.
      closeOver(Formula::negation(Formula::exists(Formula::negation(f.child()))), out);
      break;
    default:
      break;
  }
}

} // namespace

Fragment fragmentClose(const std::vector<Formula>& seed, const Language& language) {
  Fragment fragment;
  for (const Formula& f : seed) closeOver(f, fragment.formulas);
  int maxContext = 0;
  for (const Formula& f : fragment.formulas) maxContext = std::max(maxContext, f.contextSize());
  fragment.maxContext = maxContext;
  for (int ctx = 0; ctx <= maxContext; ++ctx) {
    fragment.formulas.insert(Formula::top(ctx));
    for (int i = 0; i < ctx; ++i)
      for (int j = i; j < ctx; ++j) fragment.formulas.insert(Formula::eq(i, j, ctx));
    for (const RelationSymbol& r : language.relations) {
      std::vector<int> tuple(r.arity, 0);
      if (r.arity == 0) {
        fragment.formulas.insert(Formula::atom(r.name, {}, ctx));
        continue;
      }
      if (ctx == 0) continue;
      while (true) {
        fragment.formulas.insert(Formula::atom(r.name, tuple, ctx));
        int pos = r.arity - 1;
        while (pos >= 0 && tuple[pos] == ctx - 1) tuple[pos--] = 0;
        if (pos < 0) break;
        ++tuple[pos];
      }
    }
  }
  return fragment;
}

Formula inequality(const Language& language, int i, int j, int contextSize) {
  if (!language.decidabilityWitness)
    throw Error("theory has no decidability witness for x != y");
  return substituteVariables(*language.decidabilityWitness, {i, j}, contextSize);
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace ilwb
