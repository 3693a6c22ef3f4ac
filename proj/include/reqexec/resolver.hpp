#pragma once

// Name resolution and static typing over a parsed requirements model.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "reqexec/model.hpp"
#include "reqexec/object_store.hpp"

namespace reqexec {

struct SemanticType {
  enum class Kind { Prim, Ref, RefSet, Null, Opaque } kind = Kind::Opaque;
  PrimType prim = PrimType::Integer;
  std::string className;

  static SemanticType of(PrimType p) { return {Kind::Prim, p, {}}; }
  static SemanticType ref(std::string c) { return {Kind::Ref, PrimType::Integer, std::move(c)}; }
  static SemanticType refs(std::string c) { return {Kind::RefSet, PrimType::Integer, std::move(c)}; }
  static SemanticType null() { return {Kind::Null, PrimType::Integer, {}}; }
  /// Results of external or unsupported calls; compatible with everything.
  static SemanticType opaque() { return {}; }
  static SemanticType from(const TypeRef& t);

  bool is_prim(PrimType p) const { return kind == Kind::Prim && prim == p; }
  bool is_numeric() const {
    return kind == Kind::Prim && (prim == PrimType::Integer || prim == PrimType::Real);
  }
  friend bool operator==(const SemanticType&, const SemanticType&) = default;
};

std::string to_string(const SemanticType& t);

struct NameError {
  SourceLoc location;
  std::string name;
  std::string expectedKind;
};

std::string to_string(const NameError& e);

struct TypeError {
  SourceLoc location;
  std::string message;
};

std::string to_string(const TypeError& e);

class TypeCheckError : public std::runtime_error {
 public:
  explicit TypeCheckError(TypeError e) : std::runtime_error(e.message), error_(std::move(e)) {}
  const TypeError& error() const { return error_; }

 private:
  TypeError error_;
};

/// Variable typing context for `type_of`.
struct TypeEnv {
  const Schema* schema = nullptr;
  std::map<std::string, SemanticType> params;
  std::map<std::string, SemanticType> definitions;
  std::map<std::string, SemanticType> lets;
  std::map<std::string, SemanticType> session;
  std::map<std::string, SemanticType> bound;
  std::optional<SemanticType> self;
  std::optional<SemanticType> result;
};

/// Type of a resolved expression. Throws TypeCheckError on ill-typed input.
SemanticType type_of(const Expr& expr, const TypeEnv& env);

/// A model whose names are all classified: simple names carry their VarKind,
/// parameters are ParamRef, `self.x` inside contracts is a session VarRef and
/// navigations are split into AttrNav/AssocNav.
class ResolvedModel {
 public:
  const RequirementsModel& model() const { return model_; }
  const Schema& schema() const { return *schema_; }
  std::shared_ptr<const Schema> schema_ptr() const { return schema_; }

  /// Types of the session bindings assigned anywhere in a use case.
  const std::map<std::string, SemanticType>& session_types(std::string_view useCase) const;
  TypeEnv env_for(const Contract& c) const;
  TypeEnv env_for(const Invariant& inv) const;

 private:
  friend struct ResolveDriver;
  RequirementsModel model_;
  std::shared_ptr<const Schema> schema_;
  std::map<std::string, std::map<std::string, SemanticType>, std::less<>> session_;
};

struct ResolveResult {
  std::optional<ResolvedModel> model;
  std::vector<NameError> errors;
  bool ok() const { return model.has_value(); }
};

/// All-or-nothing: any NameError means no model.
ResolveResult resolve_names(const RequirementsModel& model);

/// Type-checks every definition, guard, postcondition and invariant.
std::vector<TypeError> check_types(const ResolvedModel& model);

/// Every distinct `@pre` sub-expression in textual order.
std::vector<const Expr*> collect_at_pre(const Expr& expr);

}  // namespace reqexec
