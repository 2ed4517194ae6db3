#include "ilwb/syntax.hpp"

#include <cctype>
#include <sstream>

namespace ilwb {

std::string variableName(int index) {
  static const char* pool[] = {"x", "y", "z", "w", "u", "v", "s", "t"};
  if (index >= 0 && index < 8) return pool[index];
  return "x" + std::to_string(index);
}

std::vector<std::string> defaultNames(int contextSize) {
  std::vector<std::string> names;
  names.reserve(contextSize);
  for (int i = 0; i < contextSize; ++i) names.push_back(variableName(i));
  return names;
}

namespace {

void printInto(const Formula& f, std::vector<std::string>& names, std::ostringstream& out) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      out << f.relation() << "(";
      for (size_t i = 0; i < f.args().size(); ++i) {
        if (i) out << ",";
        out << names[f.args()[i]];
      }
      out << ")";
      return;
    }
    case FormulaKind::Eq:
      out << names[f.args()[0]] << " = " << names[f.args()[1]];
      return;
    case FormulaKind::True:
      out << "true";
      return;
    case FormulaKind::False:
      out << "false";
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      out << (f.kind() == FormulaKind::And ? "and(" : "or(");
      for (size_t i = 0; i < f.parts().size(); ++i) {
        if (i) out << ", ";
        printInto(f.parts()[i], names, out);
      }
      out << ")";
      return;
    }
    case FormulaKind::Not:
      out << "not ";
      printInto(f.child(), names, out);
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::string fresh = variableName(static_cast<int>(names.size()));
      out << (f.kind() == FormulaKind::Exists ? "exists " : "forall ") << fresh << ". ";
      names.push_back(fresh);
      printInto(f.child(), names, out);
      names.pop_back();
      return;
    }
  }
}

} // namespace

std::string printFormula(const Formula& f, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != f.contextSize())
    throw Error("printFormula: name list does not match the context size");
  std::vector<std::string> scope = names;
  std::ostringstream out;
  printInto(f, scope, out);
  return out.str();
}

std::string printFormula(const Formula& f) {
  return printFormula(f, defaultNames(f.contextSize()));
}

std::string printTheory(const Theory& theory) {
  std::ostringstream out;
  out << "language {\n";
  for (const RelationSymbol& r : theory.language.relations)
    out << "  " << r.name << "/" << r.arity << ";\n";
  out << "}\n";
  if (theory.language.decidabilityWitness) {
    out << "decidable via " << printFormula(*theory.language.decidabilityWitness, {"x", "y"})
        << ";\n";
  }
  out << "theory {\n";
  for (const CoherentAxiom& ax : theory.coherentAxioms) {
    std::vector<std::string> names = defaultNames(ax.contextSize);
    out << "  axiom ";
    if (ax.contextSize > 0) {
      out << "forall";
      for (const std::string& n : names) out << " " << n;
      out << " . ";
    }
    out << printFormula(ax.lhs, names) << " => " << printFormula(ax.rhs, names) << ";\n";
  }
  for (const Formula& s : theory.sentences)
    out << "  sentence " << printFormula(s, {}) << ";\n";
  out << "}\n";
  return out.str();
}

namespace {

struct Token {
  enum Kind { Ident, Number, Symbol, End } kind = End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, current_.line, current_.column);
  }

private:
  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
        continue;
      }
      break;
    }
    current_ = Token{};
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::End;
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      current_.kind = Token::Ident;
      current_.text = text_.substr(start, pos_ - start);
      col_ += static_cast<int>(current_.text.size());
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      current_.kind = Token::Number;
      current_.text = text_.substr(start, pos_ - start);
      col_ += static_cast<int>(current_.text.size());
      return;
    }
    current_.kind = Token::Symbol;
    if ((c == '!' || c == '=') && pos_ + 1 < text_.size()) {
      char d = text_[pos_ + 1];
      if ((c == '!' && d == '=') || (c == '=' && d == '>')) {
        current_.text = std::string() + c + d;
        pos_ += 2;
        col_ += 2;
        return;
      }
    }
    current_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class FormulaParser {
public:
  FormulaParser(Lexer& lex, const Language& language) : lex_(lex), language_(language) {}

  Formula parse(std::vector<std::string>& context) {
    Token t = lex_.peek();
    if (t.kind == Token::Symbol && t.text == "(") {
      lex_.next();
      Formula f = parse(context);
      expectSymbol(")");
      return f;
    }
    if (t.kind != Token::Ident) lex_.fail("expected a formula");

    if (t.text == "true") {
      lex_.next();
      return Formula::top(static_cast<int>(context.size()));
    }
    if (t.text == "false") {
      lex_.next();
      return Formula::bottom(static_cast<int>(context.size()));
    }
    if (t.text == "and" || t.text == "or") {
      lex_.next();
      expectSymbol("(");
      std::vector<Formula> parts = parseList(context, ",", ")");
      int n = static_cast<int>(context.size());
      return t.text == "and" ? Formula::conj(n, std::move(parts))
                             : Formula::disj(n, std::move(parts));
    }
    if (t.text == "bigor") {
      lex_.next();
      expectSymbol("[");
      std::vector<Formula> parts = parseList(context, ";", "]");
      return Formula::disj(static_cast<int>(context.size()), std::move(parts));
    }
    if (t.text == "not") {
      lex_.next();
      return Formula::negation(parse(context));
    }
    if (t.text == "exists" || t.text == "forall") {
      lex_.next();
      Token var = lex_.next();
      if (var.kind != Token::Ident)
        throw ParseError("expected a variable after the quantifier", var.line, var.column);
      expectSymbol(".");
      context.push_back(var.text);
      Formula body = parse(context);
      context.pop_back();
      return t.text == "exists" ? Formula::exists(std::move(body))
                                : Formula::forall(std::move(body));
    }

    // Relation application or (in)equality on variables.
    lex_.next();
    Token after = lex_.peek();
    if (after.kind == Token::Symbol && after.text == "(") {
      lex_.next();
      std::vector<int> args;
      if (!(lex_.peek().kind == Token::Symbol && lex_.peek().text == ")")) {
        while (true) {
          args.push_back(resolveVariable(context));
          Token sep = lex_.next();
          if (sep.kind == Token::Symbol && sep.text == ")") break;
          if (!(sep.kind == Token::Symbol && sep.text == ","))
            throw ParseError("expected ',' or ')' in the argument list", sep.line, sep.column);
        }
      } else {
        lex_.next();
      }
      const RelationSymbol* rel = language_.find(t.text);
      if (!rel) throw ParseError("unknown relation " + t.text, t.line, t.column);
      if (rel->arity != static_cast<int>(args.size()))
        throw ParseError("arity mismatch for " + t.text + ": expected " +
                             std::to_string(rel->arity) + " arguments, got " +
                             std::to_string(args.size()),
                         t.line, t.column);
      return Formula::atom(t.text, std::move(args), static_cast<int>(context.size()));
    }
    if (after.kind == Token::Symbol && (after.text == "=" || after.text == "!=")) {
      lex_.next();
      int lhs = resolveVariableToken(t, context);
      int rhs = resolveVariable(context);
      int n = static_cast<int>(context.size());
      if (after.text == "=") return Formula::eq(lhs, rhs, n);
      try {
        return inequality(language_, lhs, rhs, n);
      } catch (const Error&) {
        throw ParseError("'!=' requires a decidability witness in the language", after.line,
                         after.column);
      }
    }
    throw ParseError("unexpected token '" + t.text + "' in formula", t.line, t.column);
  }

private:
  std::vector<Formula> parseList(std::vector<std::string>& context, const std::string& sep,
                                 const std::string& close) {
    std::vector<Formula> parts;
    if (lex_.peek().kind == Token::Symbol && lex_.peek().text == close) {
      lex_.next();
      return parts;
    }
    while (true) {
      parts.push_back(parse(context));
      Token t = lex_.next();
      if (t.kind == Token::Symbol && t.text == close) break;
      if (!(t.kind == Token::Symbol && t.text == sep))
        throw ParseError("expected '" + sep + "' or '" + close + "'", t.line, t.column);
    }
    return parts;
  }

  int resolveVariable(std::vector<std::string>& context) {
    Token t = lex_.next();
    return resolveVariableToken(t, context);
  }

  int resolveVariableToken(const Token& t, std::vector<std::string>& context) {
    if (t.kind != Token::Ident) throw ParseError("expected a variable", t.line, t.column);
    for (int i = static_cast<int>(context.size()) - 1; i >= 0; --i)
      if (context[i] == t.text) return i;
    throw ParseError("unbound variable " + t.text, t.line, t.column);
  }

  void expectSymbol(const std::string& sym) {
    Token t = lex_.next();
    if (!(t.kind == Token::Symbol && t.text == sym))
      throw ParseError("expected '" + sym + "'", t.line, t.column);
  }

  Lexer& lex_;
  const Language& language_;
};

void expect(Lexer& lex, Token::Kind kind, const std::string& text) {
  Token t = lex.next();
  if (t.kind != kind || (!text.empty() && t.text != text))
    throw ParseError("expected '" + text + "'", t.line, t.column);
}

} // namespace

Formula parseFormula(const std::string& text, const std::vector<std::string>& context,
                     const Language& language) {
  Lexer lex(text);
  std::vector<std::string> scope = context;
  FormulaParser parser(lex, language);
  Formula f = parser.parse(scope);
  if (lex.peek().kind != Token::End)
    throw ParseError("trailing input after formula", lex.peek().line, lex.peek().column);
  return f;
}

std::pair<Language, Theory> parseTheory(const std::string& text) {
  Lexer lex(text);
  Language language;

  expect(lex, Token::Ident, "language");
  expect(lex, Token::Symbol, "{");
  while (!(lex.peek().kind == Token::Symbol && lex.peek().text == "}")) {
    Token name = lex.next();
    if (name.kind != Token::Ident)
      throw ParseError("expected a relation name", name.line, name.column);
    expect(lex, Token::Symbol, "/");
    Token arity = lex.next();
    if (arity.kind != Token::Number)
      throw ParseError("expected an arity", arity.line, arity.column);
    expect(lex, Token::Symbol, ";");
    if (language.find(name.text))
      throw ParseError("duplicate relation " + name.text, name.line, name.column);
    language.relations.push_back({name.text, std::stoi(arity.text)});
  }
  lex.next();  // '}'

  if (lex.peek().kind == Token::Ident && lex.peek().text == "decidable") {
    lex.next();
    expect(lex, Token::Ident, "via");
    FormulaParser parser(lex, language);
    std::vector<std::string> ctx = {"x", "y"};
    language.decidabilityWitness = parser.parse(ctx);
    expect(lex, Token::Symbol, ";");
  }

  Theory theory;
  theory.language = language;

  expect(lex, Token::Ident, "theory");
  expect(lex, Token::Symbol, "{");
  FormulaParser parser(lex, language);
  while (!(lex.peek().kind == Token::Symbol && lex.peek().text == "}")) {
    Token head = lex.next();
    if (head.kind != Token::Ident)
      throw ParseError("expected 'axiom' or 'sentence'", head.line, head.column);
    if (head.text == "axiom") {
      std::vector<std::string> ctx;
      if (lex.peek().kind == Token::Ident && lex.peek().text == "forall") {
        lex.next();
        while (!(lex.peek().kind == Token::Symbol && lex.peek().text == ".")) {
          Token v = lex.next();
          if (v.kind != Token::Ident)
            throw ParseError("expected a variable in the axiom prefix", v.line, v.column);
          ctx.push_back(v.text);
        }
        lex.next();  // '.'
      }
      Formula lhs = parser.parse(ctx);
      expect(lex, Token::Symbol, "=>");
      Formula rhs = parser.parse(ctx);
      expect(lex, Token::Symbol, ";");
      if (!isCoherent(lhs) || !isCoherent(rhs))
        throw ParseError("axiom sides must be coherent formulas", head.line, head.column);
      theory.coherentAxioms.push_back({static_cast<int>(ctx.size()), lhs, rhs});
    } else if (head.text == "sentence") {
      std::vector<std::string> ctx;
      Formula s = parser.parse(ctx);
      expect(lex, Token::Symbol, ";");
      theory.sentences.push_back(s);
    } else {
      throw ParseError("expected 'axiom' or 'sentence'", head.line, head.column);
    }
  }
  lex.next();

  if (lex.peek().kind != Token::End)
    throw ParseError("trailing input after theory block", lex.peek().line, lex.peek().column);

  // Theory-language consistency is enforced by construction: the formula
  // parser rejects unknown relations and arity mismatches.
  return {language, theory};
}

} // namespace ilwb
