#pragma once

// Runtime for compiled operations: guarded, atomic invocation against one
// object store, per-use-case sessions, hooks and invariant reports.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reqexec/decomposer.hpp"
#include "reqexec/evaluator.hpp"
#include "reqexec/object_store.hpp"
#include "reqexec/resolver.hpp"
#include "reqexec/value.hpp"

namespace reqexec {

struct Session {
  std::string useCase;
  std::map<std::string, Value> bindings;
};

struct InvariantResult {
  std::string name;
  bool holds = true;
  /// Context objects for which the invariant is false or undefined.
  std::vector<ObjectId> witnesses;
  /// Set when evaluation faulted instead of producing a value.
  std::optional<std::string> fault;
};

struct InvariantReport {
  std::vector<InvariantResult> results;
  bool all_hold() const;
  const InvariantResult* find(std::string_view name) const;
};

namespace outcome {
struct Ok {
  Value returnValue;
  InvariantReport report;
};
struct PreconditionViolated { std::string guardText; };
struct HookUnbound { std::string hookName; };
struct RuntimeFault { std::string message; };
}  // namespace outcome

using Outcome = std::variant<outcome::Ok, outcome::PreconditionViolated, outcome::HookUnbound,
                             outcome::RuntimeFault>;

/// "ok", "precondition_violated", "hook_unbound" or "fault".
const char* outcome_kind(const Outcome& o);
std::string to_string(const Outcome& o);

using HookFn = std::function<Value(const std::vector<Value>& args, ObjectStore& store)>;

class HookRegistry {
 public:
  void register_hook(const std::string& name, HookFn fn) { hooks_[name] = std::move(fn); }
  bool unregister_hook(const std::string& name) { return hooks_.erase(name) != 0; }
  const HookFn* find(const std::string& name) const;
  bool contains(const std::string& name) const { return hooks_.count(name) != 0; }

 private:
  std::map<std::string, HookFn> hooks_;
};

/// Rejected before any state change: unknown operation, wrong arity or
/// argument types.
class InvocationError : public std::runtime_error {
 public:
  enum class Kind { UnknownUseCase, UnknownOperation, ArityMismatch, TypeMismatch };
  InvocationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// What a successful invocation saw; input to `verify_postcondition`.
struct InvocationTrace {
  std::optional<ObjectStore> preStore;
  std::map<std::string, Value> params;
  std::map<std::string, Value> definitions;
  std::map<std::string, Value> lets;
  std::map<std::string, Value> session;
  std::optional<Value> result;
};

class Executor {
 public:
  Executor(std::shared_ptr<const ResolvedModel> model, std::vector<CompiledOperation> ops);

  const ResolvedModel& model() const { return *model_; }
  const std::vector<CompiledOperation>& operations() const { return ops_; }
  const CompiledOperation* find(std::string_view useCase, std::string_view op) const;

  ObjectStore& store() { return store_; }
  const ObjectStore& store() const { return store_; }
  HookRegistry& hooks() { return hooks_; }

  double tolerance() const { return tolerance_; }
  void set_tolerance(double t) { tolerance_ = t; }

  /// Throws InvocationError for an undeclared use case.
  Session open_session(const std::string& useCase) const;

  /// Throws InvocationError before touching any state; every other failure is
  /// an Outcome and leaves store and session as they were.
  Outcome invoke(Session& session, const std::string& op, const std::vector<Value>& args,
                 InvocationTrace* trace = nullptr);

  InvariantReport check_invariants() const;

 private:
  std::shared_ptr<const ResolvedModel> model_;
  std::vector<CompiledOperation> ops_;
  ObjectStore store_;
  HookRegistry hooks_;
  double tolerance_ = kDefaultTolerance;
};

InvariantReport check_invariants(const ResolvedModel& model, const ObjectStore& store,
                                 double tolerance = kDefaultTolerance);

/// Evaluates the operation's original postcondition over `post`, with `@pre`
/// read from `pre`, `oclIsNew()` meaning absent from `pre` and `result`
/// bound to the returned value.
bool verify_postcondition(const CompiledOperation& op, const ObjectStore& pre,
                          const ObjectStore& post, const InvocationTrace& bindings,
                          double tolerance = kDefaultTolerance);

}  // namespace reqexec
