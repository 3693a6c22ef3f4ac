#pragma once

// Interpreter for resolved OCL expressions over an object store.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "reqexec/model.hpp"
#include "reqexec/object_store.hpp"
#include "reqexec/value.hpp"

namespace reqexec {

/// Evaluation could not produce a value: division by zero or arithmetic on
/// an undefined operand in strict mode, a store error, an unresolved name.
class EvalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The expression lies outside the evaluable subset (external service calls
/// and unsupported collection operations).
class NotEvaluable : public EvalFault {
 public:
  using EvalFault::EvalFault;
};

struct EvalContext {
  const ObjectStore* store = nullptr;
  /// State at operation entry; consulted by `@pre` and `oclIsNew()`.
  const ObjectStore* preStore = nullptr;
  /// Pre-state values captured eagerly, keyed by the AtPre node.
  const std::map<const Expr*, Value>* captured = nullptr;

  std::map<std::string, Value> params;
  std::map<std::string, Value> definitions;
  std::map<std::string, Value> lets;
  std::map<std::string, Value> session;
  std::map<std::string, Value> bound;
  std::optional<Value> self;
  std::optional<Value> result;

  /// Answers ExternalCall/OpCall nodes; without it they are NotEvaluable.
  std::function<Value(const Expr&, EvalContext&)> opaque;

  double tolerance = kDefaultTolerance;
  /// Arithmetic on Undefined and division by zero fault instead of yielding
  /// Undefined.
  bool strict = false;
};

Value evaluate(const Expr& expr, EvalContext& ctx);
Value evaluate(const ExprPtr& expr, EvalContext& ctx);

/// Three-valued truth of a Boolean result: nullopt for Undefined.
std::optional<bool> truth(const Value& v);

/// Ordering and equality on defined values with the Real tolerance applied.
/// Returns nullopt when the operands are not comparable.
std::optional<bool> compare_values(ast::CmpOp op, const Value& a, const Value& b,
                                   double tolerance);

}  // namespace reqexec
