#include "reqexec/resolver.hpp"

#include <algorithm>
#include <functional>

namespace reqexec {

SemanticType SemanticType::from(const TypeRef& t) {
  switch (t.kind) {
    case TypeRef::Kind::Prim: return of(t.prim);
    case TypeRef::Kind::Class: return ref(t.className);
    case TypeRef::Kind::SetOf: return refs(t.className);
  }
  return opaque();
}

std::string to_string(const SemanticType& t) {
  switch (t.kind) {
    case SemanticType::Kind::Prim: return to_string(t.prim);
    case SemanticType::Kind::Ref: return t.className;
    case SemanticType::Kind::RefSet: return "Set(" + t.className + ")";
    case SemanticType::Kind::Null: return "Null";
    case SemanticType::Kind::Opaque: return "Opaque";
  }
  return "?";
}

std::string to_string(const NameError& e) {
  return std::to_string(e.location.line) + ":" + std::to_string(e.location.col) +
         ": unresolved name '" + e.name + "' (expected " + e.expectedKind + ")";
}

std::string to_string(const TypeError& e) {
  return std::to_string(e.location.line) + ":" + std::to_string(e.location.col) +
         ": type error: " + e.message;
}

// ---------------------------------------------------------------------------
// Typing

namespace {

using Kind = SemanticType::Kind;

[[noreturn]] void fail(const Expr& e, const std::string& msg) {
  throw TypeCheckError(TypeError{e.span.begin, msg});
}

bool related(const Schema* schema, const std::string& a, const std::string& b) {
  if (!schema) return a == b;
  return schema->conforms_to(a, b) || schema->conforms_to(b, a);
}

bool comparable(const Schema* schema, const SemanticType& l, const SemanticType& r) {
  if (l.kind == Kind::Opaque || r.kind == Kind::Opaque) return true;
  if (l.kind == Kind::Null || r.kind == Kind::Null) return true;
  if (l.kind != r.kind) return false;
  switch (l.kind) {
    case Kind::Prim: return (l.is_numeric() && r.is_numeric()) || l.prim == r.prim;
    case Kind::Ref:
    case Kind::RefSet: return related(schema, l.className, r.className);
    default: return true;
  }
}

const char* op_text(ast::ArithOp op) {
  switch (op) {
    case ast::ArithOp::Add: return "+";
    case ast::ArithOp::Sub: return "-";
    case ast::ArithOp::Mul: return "*";
    case ast::ArithOp::Div: return "/";
  }
  return "?";
}

class Typer {
 public:
  explicit Typer(const TypeEnv& env) : env_(env) {}

  SemanticType go(const Expr& e) {
    using namespace ast;
    const SemanticType boolean = SemanticType::of(PrimType::Boolean);
    if (e.is<IntLit>()) return SemanticType::of(PrimType::Integer);
    if (e.is<RealLit>()) return SemanticType::of(PrimType::Real);
    if (e.is<StrLit>()) return SemanticType::of(PrimType::String);
    if (e.is<BoolLit>()) return boolean;
    if (e.is<NullLit>()) return SemanticType::null();
    if (const auto* v = e.as<VarRef>()) return var(e, *v);
    if (e.is<SelfRef>()) {
      if (!env_.self) fail(e, "'self' has no type here");
      return *env_.self;
    }
    if (e.is<ResultRef>()) {
      if (!env_.result) fail(e, "'result' used by an operation without a return type");
      return *env_.result;
    }
    if (const auto* p = e.as<ParamRef>()) return lookup(e, env_.params, p->name, "parameter");
    if (const auto* n = e.as<AttrNav>()) {
      SemanticType t = go(*n->object);
      if (t.kind == Kind::Opaque) return t;
      if (t.kind != Kind::Ref) fail(e, "attribute '" + n->attr + "' read from " + to_string(t));
      const Attribute* a = schema().attribute(t.className, n->attr);
      if (!a) fail(e, "class " + t.className + " has no attribute '" + n->attr + "'");
      return SemanticType::of(a->type);
    }
    if (const auto* n = e.as<AssocNav>()) {
      SemanticType t = go(*n->object);
      if (t.kind == Kind::Opaque) return t;
      if (t.kind != Kind::Ref) fail(e, "role '" + n->role + "' navigated from " + to_string(t));
      const AssociationEnd* r = schema().role(t.className, n->role);
      if (!r) fail(e, "class " + t.className + " has no role '" + n->role + "'");
      return r->multiplicity == Multiplicity::One ? SemanticType::ref(r->target)
                                                  : SemanticType::refs(r->target);
    }
    if (const auto* n = e.as<AtPre>()) return go(*n->expr);
    if (const auto* n = e.as<AllInstances>()) {
      if (!schema().find(n->className)) fail(e, "unknown class " + n->className);
      return SemanticType::refs(n->className);
    }
    if (const auto* n = e.as<Any>()) {
      SemanticType el = element(e, *n->collection, n->boundClass);
      require_bool(*n->cond, with_bound(n->boundVar, el, *n->cond));
      return el;
    }
    if (const auto* n = e.as<Select>()) {
      SemanticType el = element(e, *n->collection, n->boundClass);
      require_bool(*n->cond, with_bound(n->boundVar, el, *n->cond));
      return el.kind == Kind::Ref ? SemanticType::refs(el.className) : el;
    }
    if (const auto* n = e.as<ForAll>()) {
      SemanticType el = element(e, *n->collection, n->boundClass);
      require_bool(*n->body, with_bound(n->boundVar, el, *n->body));
      return boolean;
    }
    if (const auto* n = e.as<Includes>()) return membership(e, *n->collection, *n->element);
    if (const auto* n = e.as<Excludes>()) return membership(e, *n->collection, *n->element);
    if (const auto* n = e.as<Size>()) {
      require_set(*n->collection, go(*n->collection));
      return SemanticType::of(PrimType::Integer);
    }
    if (const auto* n = e.as<IsEmpty>()) {
      require_set(*n->collection, go(*n->collection));
      return boolean;
    }
    if (const auto* n = e.as<IsUnique>()) {
      if (!schema().attribute(n->className, n->attr))
        fail(e, "class " + n->className + " has no attribute '" + n->attr + "'");
      return boolean;
    }
    if (const auto* n = e.as<OclIsNew>()) {
      SemanticType t = go(*n->expr);
      if (t.kind != Kind::Ref && t.kind != Kind::Opaque)
        fail(e, "oclIsNew() applied to " + to_string(t));
      return boolean;
    }
    if (const auto* n = e.as<OclIsUndefined>()) {
      go(*n->expr);
      return boolean;
    }
    if (const auto* n = e.as<OclIsTypeOf>()) {
      go(*n->expr);
      return boolean;
    }
    if (const auto* n = e.as<LetIn>()) {
      if (!schema().find(n->className)) fail(e, "unknown class " + n->className);
      auto saved = env_.lets;
      env_.lets[n->name] = SemanticType::ref(n->className);
      require_bool(*n->body, go(*n->body));
      env_.lets = std::move(saved);
      return boolean;
    }
    if (const auto* n = e.as<And>()) {
      require_bool(*n->lhs, go(*n->lhs));
      require_bool(*n->rhs, go(*n->rhs));
      return boolean;
    }
    if (const auto* n = e.as<Or>()) {
      require_bool(*n->lhs, go(*n->lhs));
      require_bool(*n->rhs, go(*n->rhs));
      return boolean;
    }
    if (const auto* n = e.as<Not>()) {
      require_bool(*n->expr, go(*n->expr));
      return boolean;
    }
    if (const auto* n = e.as<Compare>()) return compare(e, *n);
    if (const auto* n = e.as<Arith>()) return arith(e, *n);
    if (const auto* n = e.as<ExternalCall>()) {
      for (const auto& a : n->args) go(*a);
      return SemanticType::opaque();
    }
    if (const auto* n = e.as<OpCall>()) {
      SemanticType t = go(*n->target);
      if (!n->boundVar.empty() && !n->args.empty()) {
        SemanticType el = t.kind == Kind::RefSet ? SemanticType::ref(t.className)
                                                 : SemanticType::opaque();
        if (!n->boundClass.empty()) el = SemanticType::ref(n->boundClass);
        with_bound(n->boundVar, el, *n->args.front());
      } else {
        for (const auto& a : n->args) go(*a);
      }
      return SemanticType::opaque();
    }
    fail(e, "unsupported expression");
  }

 private:
  const Schema& schema() const { return *env_.schema; }

  static SemanticType lookup(const Expr& e, const std::map<std::string, SemanticType>& m,
                             const std::string& name, const char* what) {
    auto it = m.find(name);
    if (it == m.end()) fail(e, std::string("unknown ") + what + " '" + name + "'");
    return it->second;
  }

  SemanticType var(const Expr& e, const ast::VarRef& v) {
    using ast::VarKind;
    switch (v.kind) {
      case VarKind::Bound: return lookup(e, env_.bound, v.name, "iterator variable");
      case VarKind::Let: return lookup(e, env_.lets, v.name, "let binding");
      case VarKind::Definition: return lookup(e, env_.definitions, v.name, "definition");
      case VarKind::Session: {
        auto it = env_.session.find(v.name);
        if (it == env_.session.end())
          fail(e, "session binding '" + v.name + "' is never assigned");
        return it->second;
      }
      case VarKind::Unresolved: break;
    }
    fail(e, "unresolved name '" + v.name + "'");
  }

  SemanticType with_bound(const std::string& name, const SemanticType& t, const Expr& body) {
    auto saved = env_.bound;
    env_.bound[name] = t;
    SemanticType r = go(body);
    env_.bound = std::move(saved);
    return r;
  }

  SemanticType element(const Expr& e, const Expr& coll, const std::string& boundClass) {
    SemanticType t = go(coll);
    if (!boundClass.empty() && !schema().find(boundClass)) fail(e, "unknown class " + boundClass);
    if (t.kind == Kind::Opaque)
      return boundClass.empty() ? t : SemanticType::ref(boundClass);
    if (t.kind != Kind::RefSet) fail(e, "iteration over " + to_string(t));
    if (boundClass.empty()) return SemanticType::ref(t.className);
    if (!related(&schema(), boundClass, t.className))
      fail(e, "iterator typed " + boundClass + " over " + to_string(t));
    return SemanticType::ref(boundClass);
  }

  static void require_bool(const Expr& e, const SemanticType& t) {
    if (t.kind == Kind::Opaque || t.is_prim(PrimType::Boolean)) return;
    fail(e, "expected Boolean, found " + to_string(t));
  }

  static void require_set(const Expr& e, const SemanticType& t) {
    if (t.kind == Kind::Opaque || t.kind == Kind::RefSet) return;
    fail(e, "expected a collection, found " + to_string(t));
  }

  SemanticType membership(const Expr& e, const Expr& coll, const Expr& elem) {
    SemanticType c = go(coll);
    require_set(coll, c);
    SemanticType x = go(elem);
    if (x.kind == Kind::Ref && c.kind == Kind::RefSet) {
      if (!related(&schema(), x.className, c.className))
        fail(e, to_string(x) + " can never be a member of " + to_string(c));
    } else if (x.kind != Kind::Opaque && x.kind != Kind::Null && x.kind != Kind::Ref) {
      fail(e, "collection member must be an object, found " + to_string(x));
    }
    return SemanticType::of(PrimType::Boolean);
  }

  SemanticType compare(const Expr& e, const ast::Compare& c) {
    SemanticType l = go(*c.lhs);
    SemanticType r = go(*c.rhs);
    const SemanticType boolean = SemanticType::of(PrimType::Boolean);
    if (c.op == ast::CmpOp::Eq || c.op == ast::CmpOp::Ne) {
      if (!comparable(&schema(), l, r))
        fail(e, "cannot compare " + to_string(l) + " with " + to_string(r));
      return boolean;
    }
    if (l.kind == Kind::Opaque || r.kind == Kind::Opaque) return boolean;
    bool ok = (l.is_numeric() && r.is_numeric()) ||
              (l.is_prim(PrimType::String) && r.is_prim(PrimType::String));
    if (!ok) fail(e, "cannot order " + to_string(l) + " against " + to_string(r));
    return boolean;
  }

  SemanticType arith(const Expr& e, const ast::Arith& a) {
    SemanticType l = go(*a.lhs);
    SemanticType r = go(*a.rhs);
    auto numeric_or_opaque = [](const SemanticType& t) {
      return t.is_numeric() || t.kind == Kind::Opaque;
    };
    if (!numeric_or_opaque(l) || !numeric_or_opaque(r))
      fail(e, std::string("arithmetic '") + op_text(a.op) + "' over " + to_string(l) + " and " +
                  to_string(r));
    if (l.kind == Kind::Opaque || r.kind == Kind::Opaque) return SemanticType::opaque();
    if (a.op == ast::ArithOp::Div) return SemanticType::of(PrimType::Real);
    if (l.is_prim(PrimType::Integer) && r.is_prim(PrimType::Integer)) return l;
    return SemanticType::of(PrimType::Real);
  }

  TypeEnv env_;
};

}  // namespace

SemanticType type_of(const Expr& expr, const TypeEnv& env) {
  if (!env.schema) throw std::logic_error("type_of requires a schema");
  return Typer(env).go(expr);
}

// ---------------------------------------------------------------------------
// Name resolution

namespace {

enum class Section { Definition, Pre, Post, Invariant };

void collect_lets(const Expr& e, std::map<std::string, SemanticType>& out) {
  if (const auto* l = e.as<ast::LetIn>()) out[l->name] = SemanticType::ref(l->className);
  for (const auto& c : children(e)) collect_lets(*c, out);
}

class Resolver {
 public:
  Resolver(const Schema& schema, std::vector<NameError>* errors)
      : schema_(schema), errors_(errors) {
    env_.schema = &schema_;
  }

  TypeEnv env_;
  Section section_ = Section::Pre;
  bool inContract_ = true;
  std::string useCase_;
  std::optional<std::string> selfClass_;
  std::map<std::string, SemanticType> postLets_;

  ExprPtr go(const ExprPtr& e) {
    using namespace ast;
    if (!e) return e;
    const SourceSpan span = e->span;
    if (const auto* v = e->as<VarRef>()) return name(*e, v->name);
    if (e->is<SelfRef>()) {
      if (inContract_) error(*e, "self", "'self.<session binding>' navigation");
      else if (!selfClass_) error(*e, "self", "invariant with a context class");
      return e;
    }
    if (e->is<ResultRef>()) {
      if (section_ != Section::Post) error(*e, "result", "use inside a postcondition");
      else if (!env_.result) error(*e, "result", "operation with a return type");
      return e;
    }
    if (const auto* n = e->as<AttrNav>()) return navigate(*e, n->object, n->attr);
    if (const auto* n = e->as<AssocNav>()) return navigate(*e, n->object, n->role);
    if (const auto* n = e->as<AtPre>()) {
      if (!inContract_) error(*e, "@pre", "use inside a postcondition");
      return make_expr(AtPre{go(n->expr)}, span);
    }
    if (const auto* n = e->as<AllInstances>()) {
      require_class(*e, n->className);
      return e;
    }
    if (const auto* n = e->as<Any>()) {
      ExprPtr coll = go(n->collection);
      ExprPtr cond = bind(*e, coll, n->boundVar, n->boundClass, n->cond);
      return make_expr(Any{coll, n->boundVar, n->boundClass, cond}, span);
    }
    if (const auto* n = e->as<Select>()) {
      ExprPtr coll = go(n->collection);
      ExprPtr cond = bind(*e, coll, n->boundVar, n->boundClass, n->cond);
      return make_expr(Select{coll, n->boundVar, n->boundClass, cond}, span);
    }
    if (const auto* n = e->as<ForAll>()) {
      ExprPtr coll = go(n->collection);
      ExprPtr body = bind(*e, coll, n->boundVar, n->boundClass, n->body);
      return make_expr(ForAll{coll, n->boundVar, n->boundClass, body}, span);
    }
    if (const auto* n = e->as<Includes>())
      return make_expr(Includes{go(n->collection), go(n->element)}, span);
    if (const auto* n = e->as<Excludes>())
      return make_expr(Excludes{go(n->collection), go(n->element)}, span);
    if (const auto* n = e->as<Size>()) return make_expr(Size{go(n->collection)}, span);
    if (const auto* n = e->as<IsEmpty>()) return make_expr(IsEmpty{go(n->collection)}, span);
    if (const auto* n = e->as<IsUnique>()) {
      if (require_class(*e, n->className) && !schema_.attribute(n->className, n->attr))
        error(*e, n->attr, "attribute of " + n->className);
      return e;
    }
    if (const auto* n = e->as<OclIsNew>()) {
      if (!inContract_) error(*e, "oclIsNew", "use inside a postcondition");
      return make_expr(OclIsNew{go(n->expr)}, span);
    }
    if (const auto* n = e->as<OclIsUndefined>()) return make_expr(OclIsUndefined{go(n->expr)}, span);
    if (const auto* n = e->as<OclIsTypeOf>()) {
      if (!schema_.find(n->typeName) && !prim_type_from_name(n->typeName))
        error(*e, n->typeName, "class or primitive type");
      return make_expr(OclIsTypeOf{go(n->expr), n->typeName}, span);
    }
    if (const auto* n = e->as<LetIn>()) {
      require_class(*e, n->className);
      auto saved = env_.lets;
      env_.lets[n->name] = SemanticType::ref(n->className);
      ExprPtr body = go(n->body);
      env_.lets = std::move(saved);
      return make_expr(LetIn{n->name, n->className, body}, span);
    }
    if (const auto* n = e->as<And>()) return make_expr(And{go(n->lhs), go(n->rhs)}, span);
    if (const auto* n = e->as<Or>()) return make_expr(Or{go(n->lhs), go(n->rhs)}, span);
    if (const auto* n = e->as<Not>()) return make_expr(Not{go(n->expr)}, span);
    if (const auto* n = e->as<Compare>())
      return make_expr(Compare{n->op, go(n->lhs), go(n->rhs)}, span);
    if (const auto* n = e->as<Arith>()) return make_expr(Arith{n->op, go(n->lhs), go(n->rhs)}, span);
    if (const auto* n = e->as<ExternalCall>()) {
      ExternalCall out{n->service, n->op, {}};
      for (const auto& a : n->args) out.args.push_back(go(a));
      return make_expr(std::move(out), span);
    }
    if (const auto* n = e->as<OpCall>()) {
      OpCall out{go(n->target), n->op, {}, n->arrow, n->boundVar, n->boundClass};
      if (!n->boundVar.empty() && !n->args.empty()) {
        out.args.push_back(bind(*e, out.target, n->boundVar, n->boundClass, n->args.front()));
      } else {
        for (const auto& a : n->args) out.args.push_back(go(a));
      }
      return make_expr(std::move(out), span);
    }
    return e;  // literals, ParamRef
  }

 private:
  void error(const Expr& e, const std::string& name, const std::string& kind) {
    if (errors_) errors_->push_back(NameError{e.span.begin, name, kind});
  }

  bool require_class(const Expr& e, const std::string& cls) {
    if (schema_.find(cls)) return true;
    error(e, cls, "class");
    return false;
  }

  std::optional<SemanticType> try_type(const ExprPtr& e) const {
    try {
      return type_of(*e, env_);
    } catch (const TypeCheckError&) {
      return std::nullopt;
    }
  }

  ExprPtr session(const Expr& e, const std::string& n) {
    if (errors_ && !env_.session.count(n) && !postLets_.count(n)) {
      error(e, n, "parameter, definition, or session binding assigned in use case " + useCase_);
    }
    return make_expr(ast::VarRef{n, ast::VarKind::Session}, e.span);
  }

  ExprPtr name(const Expr& e, const std::string& n) {
    using ast::VarKind;
    auto var = [&](VarKind k) { return make_expr(ast::VarRef{n, k}, e.span); };
    if (env_.bound.count(n)) return var(VarKind::Bound);
    if (env_.lets.count(n)) return var(VarKind::Let);
    if (env_.definitions.count(n)) return var(VarKind::Definition);
    if (env_.params.count(n)) return make_expr(ast::ParamRef{n}, e.span);
    if (selfClass_) {
      auto self = make_expr(ast::SelfRef{}, e.span);
      if (schema_.attribute(*selfClass_, n)) return make_expr(ast::AttrNav{self, n}, e.span);
      if (const AssociationEnd* r = schema_.role(*selfClass_, n))
        return make_expr(ast::AssocNav{self, n, r->multiplicity}, e.span);
    }
    if (inContract_) {
      if (schema_.find(n)) {
        error(e, n, "value (found a class name)");
        return var(VarKind::Unresolved);
      }
      return session(e, n);
    }
    error(e, n, selfClass_ ? "iterator variable or feature of " + *selfClass_
                           : "iterator variable");
    return var(VarKind::Unresolved);
  }

  ExprPtr navigate(const Expr& e, const ExprPtr& object, const std::string& feature) {
    if (inContract_ && object->is<ast::SelfRef>()) return session(e, feature);
    ExprPtr obj = go(object);
    std::optional<SemanticType> t = try_type(obj);
    if (t && t->kind == Kind::Ref) {
      if (schema_.attribute(t->className, feature))
        return make_expr(ast::AttrNav{obj, feature}, e.span);
      if (const AssociationEnd* r = schema_.role(t->className, feature))
        return make_expr(ast::AssocNav{obj, feature, r->multiplicity}, e.span);
      error(e, feature, "attribute or role of " + t->className);
    } else if (t && t->kind != Kind::Opaque) {
      error(e, feature, "feature of an object (receiver is " + to_string(*t) + ")");
    }
    return make_expr(ast::AttrNav{obj, feature}, e.span);
  }

  ExprPtr bind(const Expr& e, const ExprPtr& coll, const std::string& var,
               const std::string& boundClass, const ExprPtr& body) {
    SemanticType el = SemanticType::opaque();
    if (!boundClass.empty()) {
      if (require_class(e, boundClass)) el = SemanticType::ref(boundClass);
    } else if (auto t = try_type(coll); t && t->kind == Kind::RefSet) {
      el = SemanticType::ref(t->className);
    }
    auto saved = env_.bound;
    env_.bound[var] = el;
    ExprPtr out = go(body);
    env_.bound = std::move(saved);
    return out;
  }

  const Schema& schema_;
  std::vector<NameError>* errors_;
};

void check_structure(const RequirementsModel& m, std::vector<NameError>& errors) {
  auto err = [&](SourceLoc loc, std::string name, std::string kind) {
    errors.push_back(NameError{loc, std::move(name), std::move(kind)});
  };
  std::map<std::string, const ConceptualClass*> classes;
  for (const auto& c : m.classes) {
    if (!classes.emplace(c.name, &c).second) err(c.loc, c.name, "unique class name");
    std::set<std::string> attrs;
    for (const auto& a : c.attributes) {
      if (!attrs.insert(a.name).second) err(c.loc, a.name, "unique attribute name in " + c.name);
    }
  }
  for (const auto& c : m.classes) {
    if (!c.superClass) continue;
    if (!classes.count(*c.superClass)) {
      err(c.loc, *c.superClass, "declared superclass");
      continue;
    }
    std::set<std::string> seen{c.name};
    for (auto cur = c.superClass; cur && classes.count(*cur); cur = classes[*cur]->superClass) {
      if (!seen.insert(*cur).second) {
        err(c.loc, c.name, "acyclic superclass chain");
        break;
      }
    }
  }
  std::set<std::pair<std::string, std::string>> roles;
  for (const auto& a : m.associations) {
    if (!classes.count(a.owner)) err(a.loc, a.owner, "declared owner class");
    if (!classes.count(a.target)) err(a.loc, a.target, "declared target class");
    if (!roles.emplace(a.owner, a.roleName).second)
      err(a.loc, a.roleName, "unique role name in " + a.owner);
    if (auto it = classes.find(a.owner); it != classes.end()) {
      for (const auto& attr : it->second->attributes) {
        if (attr.name == a.roleName)
          err(a.loc, a.roleName, "role name distinct from attributes of " + a.owner);
      }
    }
  }
  std::set<std::string> actors(m.actors.begin(), m.actors.end());
  std::set<std::string> useCases;
  for (const auto& u : m.useCases) {
    if (!useCases.insert(u.name).second) err(u.loc, u.name, "unique use case name");
    if (!actors.count(u.primaryActor)) err(u.loc, u.primaryActor, "declared actor");
    std::set<std::string> ops;
    for (const auto& op : u.operations) {
      if (!ops.insert(op).second) err(u.loc, op, "unique operation in " + u.name);
      if (!m.find_contract(u.name, op)) err(u.loc, op, "contract for " + u.name + "::" + op);
    }
  }
  std::set<std::pair<std::string, std::string>> contracts;
  for (const auto& c : m.contracts) {
    const std::string& op = c.signature.name;
    if (!contracts.emplace(c.useCase, op).second)
      err(c.loc, c.useCase + "::" + op, "unique contract");
    const UseCase* uc = m.find_use_case(c.useCase);
    if (!uc) err(c.loc, c.useCase, "declared use case");
    else if (std::find(uc->operations.begin(), uc->operations.end(), op) == uc->operations.end())
      err(c.loc, op, "operation listed in use case " + c.useCase);
    std::set<std::string> names;
    for (const auto& p : c.signature.params) {
      if (!names.insert(p.name).second) err(c.loc, p.name, "unique parameter name");
    }
    for (const auto& d : c.definitions) {
      if (!names.insert(d.name).second) err(c.loc, d.name, "unique definition name");
    }
    auto check_type = [&](const TypeRef& t) {
      if (t.kind != TypeRef::Kind::Prim && !classes.count(t.className))
        err(c.loc, t.className, "class");
    };
    if (c.signature.returnType) check_type(*c.signature.returnType);
    for (const auto& d : c.definitions) check_type(d.declaredType);
  }
  std::set<std::string> invs;
  for (const auto& inv : m.invariants) {
    if (!invs.insert(inv.name).second) err(inv.loc, inv.name, "unique invariant name");
    if (inv.contextClass && !classes.count(*inv.contextClass))
      err(inv.loc, *inv.contextClass, "class");
  }
}

void contract_env(TypeEnv& env, const Contract& c) {
  for (const auto& p : c.signature.params) env.params[p.name] = SemanticType::of(p.type);
  if (c.signature.returnType) env.result = SemanticType::from(*c.signature.returnType);
}

Contract resolve_contract(const Schema& schema, const Contract& c,
                          const std::map<std::string, SemanticType>& session,
                          std::vector<NameError>* errors) {
  Resolver r(schema, errors);
  contract_env(r.env_, c);
  r.env_.session = session;
  r.useCase_ = c.useCase;
  if (c.postcondition) collect_lets(*c.postcondition, r.postLets_);
  Contract out = c;
  r.section_ = Section::Definition;
  for (auto& d : out.definitions) {
    d.expr = r.go(d.expr);
    r.env_.definitions[d.name] = SemanticType::from(d.declaredType);
  }
  r.section_ = Section::Pre;
  out.precondition = r.go(c.precondition);
  r.section_ = Section::Post;
  out.postcondition = r.go(c.postcondition);
  return out;
}

/// Session writes `x = rhs` of a resolved postcondition, typed where possible.
void collect_writes(const Schema& schema, const Contract& c,
                    const std::map<std::string, SemanticType>& session,
                    std::map<std::string, SemanticType>& out) {
  if (!c.postcondition) return;
  TypeEnv env;
  env.schema = &schema;
  contract_env(env, c);
  env.session = session;
  for (const auto& d : c.definitions) env.definitions[d.name] = SemanticType::from(d.declaredType);
  collect_lets(*c.postcondition, env.lets);
  for (const auto& conj : split_conjuncts(c.postcondition)) {
    const auto* cmp = conj->as<ast::Compare>();
    if (!cmp || cmp->op != ast::CmpOp::Eq) continue;
    const auto* lhs = cmp->lhs->as<ast::VarRef>();
    if (!lhs || lhs->kind != ast::VarKind::Session) continue;
    SemanticType t = SemanticType::opaque();
    try {
      t = type_of(*cmp->rhs, env);
    } catch (const TypeCheckError&) {
    }
    auto it = out.find(lhs->name);
    if (it == out.end()) {
      out.emplace(lhs->name, t);
    } else if ((it->second.kind == Kind::Null || it->second.kind == Kind::Opaque) &&
               t.kind != Kind::Null && t.kind != Kind::Opaque) {
      it->second = t;
    }
  }
}

}  // namespace

struct ResolveDriver {
  static ResolveResult run(const RequirementsModel& m) {
    ResolveResult result;
    check_structure(m, result.errors);
    if (!result.errors.empty()) return result;

    ResolvedModel rm;
    rm.schema_ = std::make_shared<const Schema>(Schema::from_model(m));
    const Schema& schema = *rm.schema_;
    rm.model_ = m;

    for (const auto& uc : m.useCases) {
      std::map<std::string, SemanticType> types;
      // Reads may precede the typed write in declaration order; iterate to a fixpoint.
      for (int round = 0; round < 16; ++round) {
        std::map<std::string, SemanticType> next;
        for (const auto& c : m.contracts) {
          if (c.useCase != uc.name) continue;
          collect_writes(schema, resolve_contract(schema, c, types, nullptr), types, next);
        }
        if (next == types) break;
        types = std::move(next);
      }
      rm.session_[uc.name] = std::move(types);
    }

    for (auto& c : rm.model_.contracts) {
      c = resolve_contract(schema, c, rm.session_[c.useCase], &result.errors);
    }
    for (auto& inv : rm.model_.invariants) {
      Resolver r(schema, &result.errors);
      r.inContract_ = false;
      r.section_ = Section::Invariant;
      r.selfClass_ = inv.contextClass;
      if (inv.contextClass) r.env_.self = SemanticType::ref(*inv.contextClass);
      inv.expr = r.go(inv.expr);
    }
    if (result.errors.empty()) result.model = std::move(rm);
    return result;
  }
};

ResolveResult resolve_names(const RequirementsModel& model) { return ResolveDriver::run(model); }

const std::map<std::string, SemanticType>& ResolvedModel::session_types(
    std::string_view useCase) const {
  static const std::map<std::string, SemanticType> kEmpty;
  auto it = session_.find(useCase);
  return it == session_.end() ? kEmpty : it->second;
}

TypeEnv ResolvedModel::env_for(const Contract& c) const {
  TypeEnv env;
  env.schema = schema_.get();
  contract_env(env, c);
  for (const auto& d : c.definitions) env.definitions[d.name] = SemanticType::from(d.declaredType);
  env.session = session_types(c.useCase);
  if (c.postcondition) collect_lets(*c.postcondition, env.lets);
  return env;
}

TypeEnv ResolvedModel::env_for(const Invariant& inv) const {
  TypeEnv env;
  env.schema = schema_.get();
  if (inv.contextClass) env.self = SemanticType::ref(*inv.contextClass);
  return env;
}

namespace {

bool assignable(const Schema& schema, const TypeRef& declared, const SemanticType& t) {
  if (t.kind == Kind::Opaque || t.kind == Kind::Null) return true;
  switch (declared.kind) {
    case TypeRef::Kind::Prim:
      return t.is_prim(declared.prim) ||
             (declared.prim == PrimType::Real && t.is_prim(PrimType::Integer));
    case TypeRef::Kind::Class:
      return t.kind == Kind::Ref && schema.conforms_to(t.className, declared.className);
    case TypeRef::Kind::SetOf:
      return t.kind == Kind::RefSet && schema.conforms_to(t.className, declared.className);
  }
  return false;
}

void expect_bool(const Expr& e, const TypeEnv& env, std::vector<TypeError>& out) {
  try {
    SemanticType t = type_of(e, env);
    if (t.kind != Kind::Opaque && !t.is_prim(PrimType::Boolean))
      out.push_back(TypeError{e.span.begin, "expected Boolean, found " + to_string(t)});
  } catch (const TypeCheckError& ex) {
    out.push_back(ex.error());
  }
}

}  // namespace

std::vector<TypeError> check_types(const ResolvedModel& model) {
  std::vector<TypeError> out;
  const Schema& schema = model.schema();
  for (const auto& c : model.model().contracts) {
    TypeEnv env = model.env_for(c);
    for (const auto& d : c.definitions) {
      try {
        SemanticType t = type_of(*d.expr, env);
        if (!assignable(schema, d.declaredType, t))
          out.push_back(TypeError{d.expr->span.begin, "definition " + d.name + " declared " +
                                                          to_string(d.declaredType) + " but is " +
                                                          to_string(t)});
      } catch (const TypeCheckError& ex) {
        out.push_back(ex.error());
      }
    }
    if (c.precondition) expect_bool(*c.precondition, env, out);
    for (const auto& conj : split_conjuncts(c.postcondition)) expect_bool(*conj, env, out);
  }
  for (const auto& inv : model.model().invariants) {
    expect_bool(*inv.expr, model.env_for(inv), out);
  }
  return out;
}

std::vector<const Expr*> collect_at_pre(const Expr& expr) {
  std::vector<const Expr*> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.is<ast::AtPre>()) {
      out.push_back(&e);
      return;
    }
    for (const auto& c : children(e)) walk(*c);
  };
  walk(expr);
  return out;
}

}  // namespace reqexec
