#pragma once

// Requirements-model data types and the OCL expression AST.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reqexec {

struct SourceLoc {
  int line = 0;
  int col = 0;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

struct SourceSpan {
  SourceLoc begin;
  SourceLoc end;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

std::string to_string(const SourceSpan& span);

enum class PrimType { Integer, Real, Boolean, String };

const char* to_string(PrimType t);
std::optional<PrimType> prim_type_from_name(std::string_view name);

enum class Multiplicity { One, Many };

/// A declared type as written in signatures and definitions: a primitive,
/// a class reference, or `Set(Class)`.
struct TypeRef {
  enum class Kind { Prim, Class, SetOf } kind = Kind::Prim;
  PrimType prim = PrimType::Integer;
  std::string className;

  static TypeRef of(PrimType p) { return {Kind::Prim, p, {}}; }
  static TypeRef object(std::string c) { return {Kind::Class, PrimType::Integer, std::move(c)}; }
  static TypeRef set(std::string c) { return {Kind::SetOf, PrimType::Integer, std::move(c)}; }

  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

std::string to_string(const TypeRef& t);

// ---------------------------------------------------------------------------
// OCL expression AST

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace ast {

struct IntLit { std::int64_t value; };
struct RealLit { double value; };
struct StrLit { std::string value; };
struct BoolLit { bool value; };
struct NullLit {};

/// How a simple name was classified by name resolution.
enum class VarKind { Unresolved, Definition, Let, Bound, Session };

struct VarRef {
  std::string name;
  VarKind kind = VarKind::Unresolved;
};
struct SelfRef {};
struct ResultRef {};
struct ParamRef { std::string name; };

struct AttrNav {
  ExprPtr object;
  std::string attr;
};
struct AssocNav {
  ExprPtr object;
  std::string role;
  Multiplicity multiplicity = Multiplicity::One;
};
struct AtPre { ExprPtr expr; };
struct AllInstances { std::string className; };

/// `coll->any(v | cond)`; `boundClass` is empty when the iterator is untyped.
struct Any {
  ExprPtr collection;
  std::string boundVar;
  std::string boundClass;
  ExprPtr cond;
};
struct Select {
  ExprPtr collection;
  std::string boundVar;
  std::string boundClass;
  ExprPtr cond;
};
struct ForAll {
  ExprPtr collection;
  std::string boundVar;
  std::string boundClass;
  ExprPtr body;
};
struct Includes { ExprPtr collection; ExprPtr element; };
struct Excludes { ExprPtr collection; ExprPtr element; };
struct Size { ExprPtr collection; };
struct IsEmpty { ExprPtr collection; };
struct IsUnique {
  std::string className;
  std::string boundVar;
  std::string attr;
};
struct OclIsNew { ExprPtr expr; };
struct OclIsUndefined { ExprPtr expr; };
struct OclIsTypeOf { ExprPtr expr; std::string typeName; };

/// `let name:Class in body`; the binding covers the rest of the conjunction.
struct LetIn {
  std::string name;
  std::string className;
  ExprPtr body;
};
struct And { ExprPtr lhs; ExprPtr rhs; };
struct Or { ExprPtr lhs; ExprPtr rhs; };
struct Not { ExprPtr expr; };

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
struct Compare { CmpOp op; ExprPtr lhs; ExprPtr rhs; };

enum class ArithOp { Add, Sub, Mul, Div };
struct Arith { ArithOp op; ExprPtr lhs; ExprPtr rhs; };

/// `Service::op(args)`, a call into a third-party service.
struct ExternalCall {
  std::string service;
  std::string op;
  std::vector<ExprPtr> args;
};

/// An operation call outside the supported subset (e.g. `->sortedBy`,
/// `->first(10)`). It parses and resolves but never evaluates.
struct OpCall {
  ExprPtr target;
  std::string op;
  std::vector<ExprPtr> args;
  bool arrow = false;
  // Iterator form `->op(v:C | body)`: args holds the single body.
  std::string boundVar;
  std::string boundClass;
};

}  // namespace ast

using ExprNode = std::variant<ast::IntLit, ast::RealLit, ast::StrLit, ast::BoolLit, ast::NullLit,
                              ast::VarRef, ast::SelfRef, ast::ResultRef, ast::ParamRef,
                              ast::AttrNav, ast::AssocNav, ast::AtPre, ast::AllInstances,
                              ast::Any, ast::Select, ast::ForAll, ast::Includes, ast::Excludes,
                              ast::Size, ast::IsEmpty, ast::IsUnique, ast::OclIsNew,
                              ast::OclIsUndefined, ast::OclIsTypeOf, ast::LetIn, ast::And,
                              ast::Or, ast::Not, ast::Compare, ast::Arith, ast::ExternalCall,
                              ast::OpCall>;

struct Expr {
  ExprNode node;
  SourceSpan span;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

template <typename T>
ExprPtr make_expr(T node, SourceSpan span = {}) {
  return std::make_shared<const Expr>(Expr{ExprNode{std::move(node)}, span});
}

/// Direct sub-expressions in textual order.
std::vector<ExprPtr> children(const Expr& e);

/// Structural equality, ignoring source spans.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const ExprPtr& a, const ExprPtr& b);

// ---------------------------------------------------------------------------
// Model

struct Attribute {
  std::string name;
  PrimType type;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct ConceptualClass {
  std::string name;
  std::optional<std::string> superClass;
  std::vector<Attribute> attributes;
  bool crudMarked = false;
  SourceLoc loc;
};

struct AssociationEnd {
  std::string owner;
  std::string roleName;
  std::string target;
  Multiplicity multiplicity = Multiplicity::One;
  SourceLoc loc;
};

struct UseCase {
  std::string name;
  std::string primaryActor;
  std::vector<std::string> operations;
  SourceLoc loc;
};

struct Parameter {
  std::string name;
  PrimType type;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct OperationSignature {
  std::string name;
  std::vector<Parameter> params;
  std::optional<TypeRef> returnType;
};

struct Definition {
  std::string name;
  TypeRef declaredType;
  ExprPtr expr;
};

struct Contract {
  std::string useCase;
  OperationSignature signature;
  std::vector<Definition> definitions;
  ExprPtr precondition;
  ExprPtr postcondition;
  SourceLoc loc;
};

struct Invariant {
  std::string name;
  std::optional<std::string> contextClass;
  ExprPtr expr;
  SourceLoc loc;
};

struct RequirementsModel {
  std::vector<std::string> actors;
  std::vector<ConceptualClass> classes;
  std::vector<AssociationEnd> associations;
  std::vector<UseCase> useCases;
  std::vector<Contract> contracts;
  std::vector<Invariant> invariants;

  const ConceptualClass* find_class(std::string_view name) const;
  const UseCase* find_use_case(std::string_view name) const;
  const Contract* find_contract(std::string_view useCase, std::string_view op) const;
};

/// Structural equality of two models, ignoring source locations.
bool same_structure(const RequirementsModel& a, const RequirementsModel& b);

/// Splits a boolean expression on top-level `and`. A leading
/// `let x:C in x.oclIsNew() and rest` becomes the conjunct
/// `let x:C in x.oclIsNew()` followed by the conjuncts of `rest`.
std::vector<ExprPtr> split_conjuncts(const ExprPtr& expr);

}  // namespace reqexec
