#include "reqexec/model.hpp"

#include <algorithm>

namespace reqexec {

std::string to_string(const SourceSpan& span) {
  return std::to_string(span.begin.line) + ":" + std::to_string(span.begin.col) + "-" +
         std::to_string(span.end.line) + ":" + std::to_string(span.end.col);
}

const char* to_string(PrimType t) {
  switch (t) {
    case PrimType::Integer: return "Integer";
    case PrimType::Real: return "Real";
    case PrimType::Boolean: return "Boolean";
    case PrimType::String: return "String";
  }
  return "?";
}

std::optional<PrimType> prim_type_from_name(std::string_view name) {
  if (name == "Integer") return PrimType::Integer;
  if (name == "Real") return PrimType::Real;
  if (name == "Boolean") return PrimType::Boolean;
  if (name == "String") return PrimType::String;
  return std::nullopt;
}

std::string to_string(const TypeRef& t) {
  switch (t.kind) {
    case TypeRef::Kind::Prim: return to_string(t.prim);
    case TypeRef::Kind::Class: return t.className;
    case TypeRef::Kind::SetOf: return "Set(" + t.className + ")";
  }
  return "?";
}

namespace {

bool same_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_structure(a[i], b[i])) return false;
  }
  return true;
}

struct StructuralEq {
  const ExprNode& other;

  template <typename T>
  bool operator()(const T& a) const {
    const T& b = std::get<T>(other);
    using namespace ast;
    if constexpr (std::is_same_v<T, IntLit>) return a.value == b.value;
    else if constexpr (std::is_same_v<T, RealLit>) return a.value == b.value;
    else if constexpr (std::is_same_v<T, StrLit>) return a.value == b.value;
    else if constexpr (std::is_same_v<T, BoolLit>) return a.value == b.value;
    else if constexpr (std::is_same_v<T, NullLit> || std::is_same_v<T, SelfRef> ||
                       std::is_same_v<T, ResultRef>) return true;
    else if constexpr (std::is_same_v<T, VarRef>) return a.name == b.name && a.kind == b.kind;
    else if constexpr (std::is_same_v<T, ParamRef>) return a.name == b.name;
    else if constexpr (std::is_same_v<T, AttrNav>)
      return a.attr == b.attr && same_structure(a.object, b.object);
    else if constexpr (std::is_same_v<T, AssocNav>)
      return a.role == b.role && a.multiplicity == b.multiplicity &&
             same_structure(a.object, b.object);
    else if constexpr (std::is_same_v<T, AtPre>) return same_structure(a.expr, b.expr);
    else if constexpr (std::is_same_v<T, AllInstances>) return a.className == b.className;
    else if constexpr (std::is_same_v<T, Any> || std::is_same_v<T, Select>)
      return a.boundVar == b.boundVar && a.boundClass == b.boundClass &&
             same_structure(a.collection, b.collection) && same_structure(a.cond, b.cond);
    else if constexpr (std::is_same_v<T, ForAll>)
      return a.boundVar == b.boundVar && a.boundClass == b.boundClass &&
             same_structure(a.collection, b.collection) && same_structure(a.body, b.body);
    else if constexpr (std::is_same_v<T, Includes> || std::is_same_v<T, Excludes>)
      return same_structure(a.collection, b.collection) && same_structure(a.element, b.element);
    else if constexpr (std::is_same_v<T, Size> || std::is_same_v<T, IsEmpty>)
      return same_structure(a.collection, b.collection);
    else if constexpr (std::is_same_v<T, IsUnique>)
      return a.className == b.className && a.boundVar == b.boundVar && a.attr == b.attr;
    else if constexpr (std::is_same_v<T, OclIsNew> || std::is_same_v<T, OclIsUndefined> ||
                       std::is_same_v<T, Not>)
      return same_structure(a.expr, b.expr);
    else if constexpr (std::is_same_v<T, OclIsTypeOf>)
      return a.typeName == b.typeName && same_structure(a.expr, b.expr);
    else if constexpr (std::is_same_v<T, LetIn>)
      return a.name == b.name && a.className == b.className && same_structure(a.body, b.body);
    else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>)
      return same_structure(a.lhs, b.lhs) && same_structure(a.rhs, b.rhs);
    else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith>)
      return a.op == b.op && same_structure(a.lhs, b.lhs) && same_structure(a.rhs, b.rhs);
    else if constexpr (std::is_same_v<T, ExternalCall>)
      return a.service == b.service && a.op == b.op && same_list(a.args, b.args);
    else if constexpr (std::is_same_v<T, OpCall>)
      return a.op == b.op && a.arrow == b.arrow && a.boundVar == b.boundVar &&
             a.boundClass == b.boundClass && same_structure(a.target, b.target) &&
             same_list(a.args, b.args);
    else
      static_assert(sizeof(T) == 0, "unhandled node");
  }
};

}  // namespace

std::vector<ExprPtr> children(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::vector<ExprPtr> {
        using T = std::decay_t<decltype(n)>;
        using namespace ast;
        if constexpr (std::is_same_v<T, AttrNav> || std::is_same_v<T, AssocNav>) return {n.object};
        else if constexpr (std::is_same_v<T, AtPre> || std::is_same_v<T, OclIsNew> ||
                           std::is_same_v<T, OclIsUndefined> || std::is_same_v<T, OclIsTypeOf> ||
                           std::is_same_v<T, Not>)
          return {n.expr};
        else if constexpr (std::is_same_v<T, Any> || std::is_same_v<T, Select>)
          return {n.collection, n.cond};
        else if constexpr (std::is_same_v<T, ForAll>) return {n.collection, n.body};
        else if constexpr (std::is_same_v<T, Includes> || std::is_same_v<T, Excludes>)
          return {n.collection, n.element};
        else if constexpr (std::is_same_v<T, Size> || std::is_same_v<T, IsEmpty>)
          return {n.collection};
        else if constexpr (std::is_same_v<T, LetIn>) return {n.body};
        else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or> ||
                           std::is_same_v<T, Compare> || std::is_same_v<T, Arith>)
          return {n.lhs, n.rhs};
        else if constexpr (std::is_same_v<T, ExternalCall>) return n.args;
        else if constexpr (std::is_same_v<T, OpCall>) {
          std::vector<ExprPtr> out{n.target};
          out.insert(out.end(), n.args.begin(), n.args.end());
          return out;
        } else
          return {};
      },
      e.node);
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(StructuralEq{b.node}, a.node);
}

bool same_structure(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

const ConceptualClass* RequirementsModel::find_class(std::string_view name) const {
  auto it = std::find_if(classes.begin(), classes.end(),
                         [&](const ConceptualClass& c) { return c.name == name; });
  return it == classes.end() ? nullptr : &*it;
}

const UseCase* RequirementsModel::find_use_case(std::string_view name) const {
  auto it = std::find_if(useCases.begin(), useCases.end(),
                         [&](const UseCase& u) { return u.name == name; });
  return it == useCases.end() ? nullptr : &*it;
}

const Contract* RequirementsModel::find_contract(std::string_view useCase,
                                                 std::string_view op) const {
  auto it = std::find_if(contracts.begin(), contracts.end(), [&](const Contract& c) {
    return c.useCase == useCase && c.signature.name == op;
  });
  return it == contracts.end() ? nullptr : &*it;
}

bool same_structure(const RequirementsModel& a, const RequirementsModel& b) {
  if (a.actors != b.actors) return false;
  if (a.classes.size() != b.classes.size() || a.associations.size() != b.associations.size() ||
      a.useCases.size() != b.useCases.size() || a.contracts.size() != b.contracts.size() ||
      a.invariants.size() != b.invariants.size())
    return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.superClass != y.superClass || x.attributes != y.attributes ||
        x.crudMarked != y.crudMarked)
      return false;
  }
  for (std::size_t i = 0; i < a.associations.size(); ++i) {
    const auto& x = a.associations[i];
    const auto& y = b.associations[i];
    if (x.owner != y.owner || x.roleName != y.roleName || x.target != y.target ||
        x.multiplicity != y.multiplicity)
      return false;
  }
  for (std::size_t i = 0; i < a.useCases.size(); ++i) {
    const auto& x = a.useCases[i];
    const auto& y = b.useCases[i];
    if (x.name != y.name || x.primaryActor != y.primaryActor || x.operations != y.operations)
      return false;
  }
  for (std::size_t i = 0; i < a.contracts.size(); ++i) {
    const auto& x = a.contracts[i];
    const auto& y = b.contracts[i];
    if (x.useCase != y.useCase || x.signature.name != y.signature.name ||
        x.signature.params != y.signature.params ||
        x.signature.returnType != y.signature.returnType ||
        x.definitions.size() != y.definitions.size())
      return false;
    for (std::size_t d = 0; d < x.definitions.size(); ++d) {
      if (x.definitions[d].name != y.definitions[d].name ||
          !(x.definitions[d].declaredType == y.definitions[d].declaredType) ||
          !same_structure(x.definitions[d].expr, y.definitions[d].expr))
        return false;
    }
    if (!same_structure(x.precondition, y.precondition) ||
        !same_structure(x.postcondition, y.postcondition))
      return false;
  }
  for (std::size_t i = 0; i < a.invariants.size(); ++i) {
    const auto& x = a.invariants[i];
    const auto& y = b.invariants[i];
    if (x.name != y.name || x.contextClass != y.contextClass || !same_structure(x.expr, y.expr))
      return false;
  }
  return true;
}

namespace {

void split_into(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (const auto* a = e->as<ast::And>()) {
    split_into(a->lhs, out);
    split_into(a->rhs, out);
    return;
  }
  if (const auto* let = e->as<ast::LetIn>()) {
    std::vector<ExprPtr> inner;
    split_into(let->body, inner);
    ast::LetIn head{let->name, let->className, inner.front()};
    SourceSpan span{e->span.begin, inner.front()->span.end};
    out.push_back(make_expr(std::move(head), span));
    out.insert(out.end(), inner.begin() + 1, inner.end());
    return;
  }
  out.push_back(e);
}

}  // namespace

std::vector<ExprPtr> split_conjuncts(const ExprPtr& expr) {
  std::vector<ExprPtr> out;
  if (expr) split_into(expr, out);
  return out;
}

}  // namespace reqexec
