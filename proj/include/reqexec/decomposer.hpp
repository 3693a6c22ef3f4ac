#pragma once

// Rule-based compilation of contracts into plans of primitive store
// operations (rules R1-R26).

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reqexec/model.hpp"
#include "reqexec/resolver.hpp"

namespace reqexec {

enum class Section { Definition, Pre, Post };

/// Rule number 1..26 for a single conjunct, or nullopt. Definition
/// sub-formulas are written `name = expr`.
std::optional<int> match_rule(const Expr& subFormula, Section section);

struct Instruction;
using InstructionList = std::vector<Instruction>;

namespace instr {

/// Definition lookups. `boundVar`/`cond` are empty for unfiltered forms.
struct FindObject { std::string dest, className, boundVar; ExprPtr cond; };
struct FindObjects { std::string dest, className, boundVar; ExprPtr cond; };
struct FindLinked { std::string dest; ExprPtr source; std::string role, boundVar; ExprPtr cond; };
struct FindLinkedMany { std::string dest; ExprPtr source; std::string role, boundVar; ExprPtr cond; };
struct GetAttr { std::string dest; ExprPtr source; std::string attr; };
struct EvalToTemp { std::string dest; ExprPtr expr; };

struct Create { std::string dest, className; };
struct Add { std::string className; ExprPtr src; };
struct Release { std::string className; ExprPtr src; };
struct SetAttr { ExprPtr src; std::string attr; ExprPtr value; };
struct LinkOne { ExprPtr src; std::string role; ExprPtr target; };
struct LinkMany { ExprPtr src; std::string role; ExprPtr target; };
struct UnlinkOne { ExprPtr src; std::string role; };
struct UnlinkMany { ExprPtr src; std::string role; ExprPtr target; };
struct ForEach { ExprPtr collection; std::string boundVar; InstructionList body; };
struct BindSession { std::string name; ExprPtr value; };
/// Calls a registered hook; the result lands in definition slot `dest`.
struct CallHook { std::string hook; std::vector<ExprPtr> args; std::optional<std::string> dest; };
struct Return { ExprPtr value; };

}  // namespace instr

using InstructionNode =
    std::variant<instr::FindObject, instr::FindObjects, instr::FindLinked, instr::FindLinkedMany,
                 instr::GetAttr, instr::EvalToTemp, instr::Create, instr::Add, instr::Release,
                 instr::SetAttr, instr::LinkOne, instr::LinkMany, instr::UnlinkOne,
                 instr::UnlinkMany, instr::ForEach, instr::BindSession, instr::CallHook,
                 instr::Return>;

struct Instruction {
  InstructionNode node;
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct HookSpec {
  std::string name;
  std::vector<SemanticType> paramTypes;
  std::optional<SemanticType> returnType;
  SourceSpan origin;
  /// The conjunct (or sub-expression) the hook stands for, in DSL syntax.
  std::string text;
};

struct TraceEntry {
  int index = 0;
  /// "R<n>", "R21*" for session writes, "HOOK", or "EVAL" for definition and
  /// guard conjuncts outside the rule tables.
  std::string rule;
  SourceSpan span;
};

struct CompiledOperation {
  /// The resolved contract the plans were built from; instruction operands
  /// point into it.
  Contract contract;
  InstructionList definitionPlan;
  ExprPtr guard;
  std::string guardText;
  InstructionList postPlan;
  std::vector<HookSpec> hooks;
  /// One entry per postcondition conjunct, in textual order.
  std::vector<TraceEntry> ruleTrace;
  std::vector<TraceEntry> definitionTrace;
  std::vector<TraceEntry> guardTrace;
  /// Non-evaluable nodes inside definitions and the guard, answered by hooks.
  std::map<const Expr*, std::string> nodeHooks;
  std::vector<const Expr*> atPre;

  const std::string& useCase() const { return contract.useCase; }
  const OperationSignature& signature() const { return contract.signature; }
  bool executable() const { return hooks.empty(); }
};

struct CompileError {
  SourceLoc location;
  std::string message;
};

std::string to_string(const CompileError& e);

class CompileFailure : public std::runtime_error {
 public:
  explicit CompileFailure(CompileError e)
      : std::runtime_error(e.message), error_(std::move(e)) {}
  const CompileError& error() const { return error_; }

 private:
  CompileError error_;
};

/// Throws CompileFailure on structural violations; never fails because a
/// conjunct is non-executable.
CompiledOperation compile_contract(const Contract& contract, const ResolvedModel& model);

struct CompileResult {
  std::vector<CompiledOperation> operations;
  std::vector<CompileError> errors;
};

CompileResult compile_model(const ResolvedModel& model);

struct OperationStatus {
  std::string useCase;
  std::string operation;
  bool executable = true;
  std::vector<std::string> hooks;
};

struct ExecutabilityReport {
  std::vector<OperationStatus> operations;
  int total() const { return static_cast<int>(operations.size()); }
  int executable() const;
  /// Percentage; 100 for an empty model.
  double success_rate() const;
};

ExecutabilityReport analyze_executability(const std::vector<CompiledOperation>& ops);

std::string to_string(const TraceEntry& t);
std::string print_instruction(const Instruction& ins, int indent = 0);
std::string print_plan(const InstructionList& plan);
std::string print_trace(const std::vector<TraceEntry>& trace);

}  // namespace reqexec
