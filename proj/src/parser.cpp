#include "reqexec/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace reqexec {

std::string to_string(const ParseDiagnostic& d) {
  std::string out = d.file.empty() ? std::string("<input>") : d.file;
  out += ":" + std::to_string(d.location.line) + ":" + std::to_string(d.location.col) + ": ";
  out += d.severity == ParseDiagnostic::Severity::Error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

namespace {

enum class Tok {
  Ident, Int, Real, String,
  LParen, RParen, LBrace, RBrace, Colon, ColonColon, Semi, Comma, Dot, Arrow, Bar, At,
  Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc begin;
  SourceLoc end;
};

struct SyntaxError : std::runtime_error {
  SourceLoc loc;
  SyntaxError(SourceLoc l, const std::string& msg) : std::runtime_error(msg), loc(l) {}
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.begin = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        t.end = t.begin;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      t.end = here();
      out.push_back(std::move(t));
    }
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool peek_is(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (peek_is("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (peek_is("/*")) {
        SourceLoc start = here();
        advance();
        advance();
        while (pos_ < src_.size() && !peek_is("*/")) advance();
        if (pos_ >= src_.size()) throw SyntaxError(start, "unterminated block comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    bool real = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      real = true;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        real = true;
        while (pos_ < look) advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
      }
    }
    t.kind = real ? Tok::Real : Tok::Int;
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  void lex_string(Token& t) {
    SourceLoc start = here();
    advance();
    std::string value;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw SyntaxError(start, "unterminated string literal");
      char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw SyntaxError(start, "unterminated string literal");
        char e = src_[pos_];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default: throw SyntaxError(here(), std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    t.kind = Tok::String;
    t.text = std::move(value);
  }

  void lex_punct(Token& t) {
    struct P { std::string_view s; Tok k; };
    static constexpr P table[] = {
        {"::", Tok::ColonColon}, {"->", Tok::Arrow}, {"<>", Tok::Ne}, {"<=", Tok::Le},
        {">=", Tok::Ge},         {"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace},
        {"}", Tok::RBrace},      {":", Tok::Colon},  {";", Tok::Semi},   {",", Tok::Comma},
        {".", Tok::Dot},         {"|", Tok::Bar},    {"@", Tok::At},     {"=", Tok::Eq},
        {"<", Tok::Lt},          {">", Tok::Gt},     {"+", Tok::Plus},   {"-", Tok::Minus},
        {"*", Tok::Star},        {"/", Tok::Slash},
    };
    for (const auto& p : table) {
      if (peek_is(p.s)) {
        for (std::size_t i = 0; i < p.s.size(); ++i) advance();
        t.kind = p.k;
        t.text = std::string(p.s);
        return;
      }
    }
    throw SyntaxError(here(), std::string("unexpected character '") + src_[pos_] + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_reserved(std::string_view w) {
  return w == "and" || w == "or" || w == "not" || w == "let" || w == "in" || w == "true" ||
         w == "false" || w == "null" || w == "self" || w == "result";
}

bool is_top_level_keyword(std::string_view w) {
  return w == "actor" || w == "class" || w == "assoc" || w == "usecase" || w == "inv" ||
         w == "contract" || w == "Contract";
}

// Precedence ladder, loosest first.
enum Prec { kOr = 1, kAnd, kCmp, kAdd, kMul, kUnary };

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  // --- expressions --------------------------------------------------------

  ExprPtr expression() { return parse_or(); }

  bool at_end() const { return peek().kind == Tok::End; }
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  // --- model --------------------------------------------------------------

  void model(RequirementsModel& m, std::vector<ParseDiagnostic>& diags, const std::string& file) {
    while (!at_end()) {
      std::size_t start = pos_;
      try {
        declaration(m);
      } catch (const SyntaxError& e) {
        diags.push_back({ParseDiagnostic::Severity::Error, file, e.loc, e.what()});
        if (pos_ == start) ++pos_;
        while (!at_end() && !(peek().kind == Tok::Ident && is_top_level_keyword(peek().text)))
          ++pos_;
      }
    }
  }

 private:
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_end_ = t.end;
    return t;
  }

  bool accept(Tok k) {
    if (peek().kind == k) {
      next();
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    if (peek().kind == Tok::Ident && peek().text == w) {
      next();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
    throw SyntaxError(t.begin, "expected " + what + ", found " + found);
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(what);
    return next();
  }

  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("'" + std::string(w) + "'");
  }

  std::string identifier(const char* what = "identifier") {
    if (peek().kind != Tok::Ident || is_reserved(peek().text)) fail(what);
    return next().text;
  }

  SourceSpan span_from(SourceLoc begin) const { return {begin, last_end_}; }

  template <typename T>
  ExprPtr node(T n, SourceLoc begin) {
    return make_expr(std::move(n), span_from(begin));
  }

  ExprPtr parse_or() {
    SourceLoc b = peek().begin;
    ExprPtr lhs = parse_and();
    while (accept_word("or")) {
      ExprPtr rhs = parse_and();
      lhs = node(ast::Or{lhs, rhs}, b);
    }
    return lhs;
  }

  ExprPtr parse_and() {
    SourceLoc b = peek().begin;
    ExprPtr lhs = parse_cmp();
    while (accept_word("and")) {
      ExprPtr rhs = parse_cmp();
      lhs = node(ast::And{lhs, rhs}, b);
    }
    return lhs;
  }

  ExprPtr parse_cmp() {
    SourceLoc b = peek().begin;
    ExprPtr lhs = parse_add();
    std::optional<ast::CmpOp> op;
    switch (peek().kind) {
      case Tok::Eq: op = ast::CmpOp::Eq; break;
      case Tok::Ne: op = ast::CmpOp::Ne; break;
      case Tok::Lt: op = ast::CmpOp::Lt; break;
      case Tok::Le: op = ast::CmpOp::Le; break;
      case Tok::Gt: op = ast::CmpOp::Gt; break;
      case Tok::Ge: op = ast::CmpOp::Ge; break;
      default: return lhs;
    }
    next();
    ExprPtr rhs = parse_add();
    return node(ast::Compare{*op, lhs, rhs}, b);
  }

  ExprPtr parse_add() {
    SourceLoc b = peek().begin;
    ExprPtr lhs = parse_mul();
    for (;;) {
      ast::ArithOp op;
      if (peek().kind == Tok::Plus) op = ast::ArithOp::Add;
      else if (peek().kind == Tok::Minus) op = ast::ArithOp::Sub;
      else return lhs;
      next();
      ExprPtr rhs = parse_mul();
      lhs = node(ast::Arith{op, lhs, rhs}, b);
    }
  }

  ExprPtr parse_mul() {
    SourceLoc b = peek().begin;
    ExprPtr lhs = parse_unary();
    for (;;) {
      ast::ArithOp op;
      if (peek().kind == Tok::Star) op = ast::ArithOp::Mul;
      else if (peek().kind == Tok::Slash) op = ast::ArithOp::Div;
      else return lhs;
      next();
      ExprPtr rhs = parse_unary();
      lhs = node(ast::Arith{op, lhs, rhs}, b);
    }
  }

  ExprPtr parse_unary() {
    SourceLoc b = peek().begin;
    if (accept_word("not")) {
      ExprPtr e = parse_unary();
      return node(ast::Not{e}, b);
    }
    if (accept(Tok::Minus)) {
      ExprPtr e = parse_unary();
      if (const auto* i = e->as<ast::IntLit>()) return node(ast::IntLit{-i->value}, b);
      if (const auto* r = e->as<ast::RealLit>()) return node(ast::RealLit{-r->value}, b);
      return node(ast::Arith{ast::ArithOp::Sub, make_expr(ast::IntLit{0}, {b, b}), e}, b);
    }
    if (accept_word("let")) {
      std::string name = identifier("let variable name");
      expect(Tok::Colon, "':' after let variable");
      std::string cls = identifier("class name");
      expect_word("in");
      ExprPtr body = parse_or();
      return node(ast::LetIn{name, cls, body}, b);
    }
    return parse_postfix();
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    expect(Tok::LParen, "'('");
    if (accept(Tok::RParen)) return args;
    do {
      args.push_back(parse_or());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    return args;
  }

  void empty_args() {
    expect(Tok::LParen, "'('");
    expect(Tok::RParen, "')'");
  }

  struct Iterator {
    std::string var;
    std::string cls;
    ExprPtr body;
  };

  // `(v[:C] | body)`
  Iterator iterator_args() {
    Iterator it;
    expect(Tok::LParen, "'('");
    it.var = identifier("iterator variable");
    if (accept(Tok::Colon)) it.cls = identifier("iterator type");
    expect(Tok::Bar, "'|'");
    it.body = parse_or();
    expect(Tok::RParen, "')'");
    return it;
  }

  bool iterator_ahead() const {
    if (peek().kind != Tok::LParen || peek(1).kind != Tok::Ident) return false;
    if (peek(2).kind == Tok::Bar) return true;
    return peek(2).kind == Tok::Colon && peek(3).kind == Tok::Ident && peek(4).kind == Tok::Bar;
  }

  ExprPtr parse_postfix() {
    SourceLoc b = peek().begin;
    ExprPtr e = parse_primary();
    for (;;) {
      if (accept(Tok::At)) {
        expect_word("pre");
        e = node(ast::AtPre{e}, b);
      } else if (accept(Tok::Dot)) {
        e = dot_member(e, b);
      } else if (accept(Tok::Arrow)) {
        e = arrow_member(e, b);
      } else {
        return e;
      }
    }
  }

  ExprPtr dot_member(ExprPtr target, SourceLoc b) {
    std::string name = identifier("member name after '.'");
    if (peek().kind != Tok::LParen) return node(ast::AttrNav{target, name}, b);
    if (name == "oclIsUndefined") {
      empty_args();
      return node(ast::OclIsUndefined{target}, b);
    }
    if (name == "oclIsNew") {
      empty_args();
      return node(ast::OclIsNew{target}, b);
    }
    if (name == "oclIsTypeOf") {
      expect(Tok::LParen, "'('");
      std::string type = identifier("type name");
      expect(Tok::RParen, "')'");
      return node(ast::OclIsTypeOf{target, type}, b);
    }
    if (name == "size" || name == "isEmpty" || name == "includes" || name == "excludes")
      return collection_op(target, name, b);
    return generic_call(target, name, false, b);
  }

  ExprPtr arrow_member(ExprPtr target, SourceLoc b) {
    std::string name = identifier("operation name after '->'");
    if (name == "any" || name == "select" || name == "forAll") {
      Iterator it = iterator_args();
      if (name == "any") return node(ast::Any{target, it.var, it.cls, it.body}, b);
      if (name == "select") return node(ast::Select{target, it.var, it.cls, it.body}, b);
      return node(ast::ForAll{target, it.var, it.cls, it.body}, b);
    }
    if (name == "isUnique") {
      SourceLoc at = peek().begin;
      Iterator it = iterator_args();
      const auto* all = target->as<ast::AllInstances>();
      const auto* nav = it.body->as<ast::AttrNav>();
      const auto* var = nav ? nav->object->as<ast::VarRef>() : nullptr;
      if (!all || !var || var->name != it.var || (!it.cls.empty() && it.cls != all->className))
        throw SyntaxError(at, "isUnique is supported only as C.allInstances()->isUnique(o:C | o.attr)");
      return node(ast::IsUnique{all->className, it.var, nav->attr}, b);
    }
    if (name == "size" || name == "isEmpty" || name == "includes" || name == "excludes")
      return collection_op(target, name, b);
    return generic_call(target, name, true, b);
  }

  ExprPtr collection_op(ExprPtr target, const std::string& name, SourceLoc b) {
    if (name == "size") {
      empty_args();
      return node(ast::Size{target}, b);
    }
    if (name == "isEmpty") {
      empty_args();
      return node(ast::IsEmpty{target}, b);
    }
    expect(Tok::LParen, "'('");
    ExprPtr arg = parse_or();
    expect(Tok::RParen, "')'");
    if (name == "includes") return node(ast::Includes{target, arg}, b);
    return node(ast::Excludes{target, arg}, b);
  }

  ExprPtr generic_call(ExprPtr target, const std::string& name, bool arrow, SourceLoc b) {
    ast::OpCall call{target, name, {}, arrow, {}, {}};
    if (iterator_ahead()) {
      Iterator it = iterator_args();
      call.boundVar = it.var;
      call.boundClass = it.cls;
      call.args.push_back(it.body);
    } else {
      call.args = call_args();
    }
    return node(std::move(call), b);
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    SourceLoc b = t.begin;
    switch (t.kind) {
      case Tok::Int: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) throw SyntaxError(b, "integer literal out of range");
        next();
        return node(ast::IntLit{v}, b);
      }
      case Tok::Real: {
        double v = std::strtod(t.text.c_str(), nullptr);
        next();
        return node(ast::RealLit{v}, b);
      }
      case Tok::String: {
        std::string v = t.text;
        next();
        return node(ast::StrLit{std::move(v)}, b);
      }
      case Tok::LParen: {
        next();
        ExprPtr e = parse_or();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: break;
      default: fail("expression");
    }
    const std::string word = t.text;
    if (word == "true" || word == "false") {
      next();
      return node(ast::BoolLit{word == "true"}, b);
    }
    if (word == "null") {
      next();
      return node(ast::NullLit{}, b);
    }
    if (word == "self") {
      next();
      return node(ast::SelfRef{}, b);
    }
    if (word == "result") {
      next();
      return node(ast::ResultRef{}, b);
    }
    if (is_reserved(word)) fail("expression");
    next();
    if (peek().kind == Tok::ColonColon) {
      next();
      std::string op = identifier("service operation name");
      std::vector<ExprPtr> args = call_args();
      return node(ast::ExternalCall{word, op, std::move(args)}, b);
    }
    if (peek().kind == Tok::Dot && peek(1).kind == Tok::Ident &&
        (peek(1).text == "allInstances" || peek(1).text == "allInstance") &&
        peek(2).kind == Tok::LParen) {
      next();
      next();
      empty_args();
      return node(ast::AllInstances{word}, b);
    }
    return node(ast::VarRef{word, ast::VarKind::Unresolved}, b);
  }

  // --- declarations -------------------------------------------------------

  TypeRef type_ref() {
    std::string name = identifier("type name");
    if (auto p = prim_type_from_name(name)) return TypeRef::of(*p);
    if (name == "Set" && accept(Tok::LParen)) {
      std::string cls = identifier("class name");
      expect(Tok::RParen, "')'");
      return TypeRef::set(cls);
    }
    return TypeRef::object(name);
  }

  PrimType prim_type() {
    SourceLoc at = peek().begin;
    std::string name = identifier("primitive type");
    auto p = prim_type_from_name(name);
    if (!p) throw SyntaxError(at, "expected Integer, Real, Boolean or String, found '" + name + "'");
    return *p;
  }

  void declaration(RequirementsModel& m) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || !is_top_level_keyword(t.text)) fail("top-level declaration");
    std::string kw = t.text;
    SourceLoc loc = t.begin;
    next();
    if (kw == "actor") {
      m.actors.push_back(identifier("actor name"));
      accept(Tok::Semi);
    } else if (kw == "class") {
      class_decl(m, loc);
    } else if (kw == "assoc") {
      AssociationEnd a;
      a.loc = loc;
      a.owner = identifier("owner class");
      expect(Tok::Dot, "'.'");
      a.roleName = identifier("role name");
      expect(Tok::Arrow, "'->'");
      a.target = identifier("target class");
      if (accept_word("one")) a.multiplicity = Multiplicity::One;
      else if (accept_word("many")) a.multiplicity = Multiplicity::Many;
      else fail("'one' or 'many'");
      accept(Tok::Semi);
      m.associations.push_back(std::move(a));
    } else if (kw == "usecase") {
      UseCase u;
      u.loc = loc;
      u.name = identifier("use case name");
      expect_word("actor");
      u.primaryActor = identifier("actor name");
      expect(Tok::LBrace, "'{'");
      while (!accept(Tok::RBrace)) {
        u.operations.push_back(identifier("operation name"));
        accept(Tok::Semi);
      }
      m.useCases.push_back(std::move(u));
    } else if (kw == "inv") {
      Invariant inv;
      inv.loc = loc;
      inv.name = identifier("invariant name");
      if (accept_word("on")) inv.contextClass = identifier("context class");
      expect(Tok::Colon, "':'");
      inv.expr = expression();
      accept(Tok::Semi);
      m.invariants.push_back(std::move(inv));
    } else {
      contract_decl(m, loc);
    }
  }

  void class_decl(RequirementsModel& m, SourceLoc loc) {
    ConceptualClass c;
    c.loc = loc;
    c.name = identifier("class name");
    if (accept_word("extends")) c.superClass = identifier("superclass name");
    if (accept_word("crud")) c.crudMarked = true;
    expect(Tok::LBrace, "'{'");
    while (!accept(Tok::RBrace)) {
      Attribute a;
      a.name = identifier("attribute name");
      expect(Tok::Colon, "':'");
      a.type = prim_type();
      expect(Tok::Semi, "';'");
      c.attributes.push_back(std::move(a));
    }
    m.classes.push_back(std::move(c));
  }

  bool section_ahead(std::string_view word) const {
    return peek().kind == Tok::Ident && peek().text == word && peek(1).kind == Tok::Colon;
  }

  void contract_decl(RequirementsModel& m, SourceLoc loc) {
    Contract c;
    c.loc = loc;
    c.useCase = identifier("use case name");
    expect(Tok::ColonColon, "'::'");
    c.signature.name = identifier("operation name");
    expect(Tok::LParen, "'('");
    if (!accept(Tok::RParen)) {
      do {
        Parameter p;
        p.name = identifier("parameter name");
        expect(Tok::Colon, "':'");
        p.type = prim_type();
        c.signature.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    if (accept(Tok::Colon)) c.signature.returnType = type_ref();
    expect(Tok::LBrace, "'{'");
    if (section_ahead("definition")) {
      next();
      next();
      while (!section_ahead("precondition") && peek().kind != Tok::RBrace && !at_end()) {
        Definition d;
        d.name = identifier("definition name");
        expect(Tok::Colon, "':'");
        d.declaredType = type_ref();
        expect(Tok::Eq, "'='");
        d.expr = expression();
        accept(Tok::Semi);
        c.definitions.push_back(std::move(d));
      }
    }
    if (!section_ahead("precondition")) fail("'precondition:'");
    next();
    next();
    c.precondition = expression();
    if (!section_ahead("postcondition")) fail("'postcondition:'");
    next();
    next();
    c.postcondition = expression();
    expect(Tok::RBrace, "'}' closing the contract");
    m.contracts.push_back(std::move(c));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceLoc last_end_;
};

}  // namespace

ParseResult parse_model(const std::vector<SourceFile>& sources) {
  ParseResult result;
  RequirementsModel model;
  for (const auto& src : sources) {
    std::vector<Token> toks;
    try {
      toks = Lexer(src.content).run();
    } catch (const SyntaxError& e) {
      result.diagnostics.push_back({ParseDiagnostic::Severity::Error, src.path, e.loc, e.what()});
      continue;
    }
    Parser(std::move(toks)).model(model, result.diagnostics, src.path);
  }
  bool has_error = false;
  for (const auto& d : result.diagnostics)
    has_error |= d.severity == ParseDiagnostic::Severity::Error;
  if (!has_error) result.model = std::move(model);
  return result;
}

ExprParseResult parse_ocl_expr(std::string_view text) {
  ExprParseResult out;
  try {
    Parser p(Lexer(text).run());
    ExprPtr e = p.expression();
    if (!p.at_end()) {
      const auto& t = p.peek();
      throw SyntaxError(t.begin, "unexpected '" + t.text + "' after expression");
    }
    out.expr = std::move(e);
  } catch (const SyntaxError& e) {
    out.diagnostic = ParseDiagnostic{ParseDiagnostic::Severity::Error, {}, e.loc, e.what()};
  }
  return out;
}

ParseResult parse_model_files(const std::vector<std::string>& paths) {
  std::vector<SourceFile> files;
  std::vector<ParseDiagnostic> io_errors;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      io_errors.push_back({ParseDiagnostic::Severity::Error, path, {}, "cannot read file"});
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    files.push_back({path, ss.str()});
  }
  ParseResult r = parse_model(files);
  if (!io_errors.empty()) {
    r.model.reset();
    r.diagnostics.insert(r.diagnostics.begin(), io_errors.begin(), io_errors.end());
  }
  return r;
}

}  // namespace reqexec
