#include "reqexec/decomposer.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "reqexec/printer.hpp"

namespace reqexec {

namespace {

using namespace ast;

bool any_node(const Expr& e, const std::function<bool(const Expr&)>& pred) {
  if (pred(e)) return true;
  for (const auto& c : children(e)) {
    if (any_node(*c, pred)) return true;
  }
  return false;
}

bool is_opaque(const Expr& e) { return e.is<OpCall>() || e.is<ExternalCall>(); }
bool contains_opaque(const Expr& e) { return any_node(e, is_opaque); }

bool is_many_nav(const Expr& e) {
  const auto* n = e.as<AssocNav>();
  return n && n->multiplicity == Multiplicity::Many;
}

bool is_one_nav(const Expr& e) {
  const auto* n = e.as<AssocNav>();
  return n && n->multiplicity == Multiplicity::One;
}

bool is_session(const Expr& e) {
  const auto* v = e.as<VarRef>();
  return v && v->kind == VarKind::Session;
}

bool is_literal(const Expr& e) {
  return e.is<IntLit>() || e.is<RealLit>() || e.is<StrLit>() || e.is<BoolLit>() ||
         e.is<NullLit>();
}

const Compare* as_eq(const Expr& e) {
  const auto* c = e.as<Compare>();
  return c && c->op == CmpOp::Eq ? c : nullptr;
}

/// `x = bool` or the bare form `x`, where x satisfies `pred`.
bool bool_check(const Expr& e, const std::function<bool(const Expr&)>& pred) {
  if (pred(e)) return true;
  const Compare* c = as_eq(e);
  return c && pred(*c->lhs) && c->rhs->is<BoolLit>();
}

std::optional<int> match_definition(const Expr& s) {
  const Compare* c = as_eq(s);
  if (!c || !c->lhs->is<VarRef>() || contains_opaque(*c->rhs)) return std::nullopt;
  const Expr& r = *c->rhs;
  if (r.is<AllInstances>()) return 1;
  if (const auto* sel = r.as<Select>()) {
    if (sel->collection->is<AllInstances>()) return 2;
    if (is_many_nav(*sel->collection)) return 6;
  }
  if (const auto* any = r.as<Any>()) {
    if (any->collection->is<AllInstances>()) return 3;
    if (is_many_nav(*any->collection)) return 7;
  }
  if (is_one_nav(r)) return 4;
  if (is_many_nav(r)) return 5;
  return std::nullopt;
}

std::optional<int> match_pre(const Expr& s) {
  if (contains_opaque(s)) return std::nullopt;
  if (const Compare* c = as_eq(s); c && c->lhs->is<OclIsUndefined>() && c->rhs->is<BoolLit>())
    return 8;
  if (bool_check(s, [](const Expr& e) { return e.is<OclIsTypeOf>(); })) return 9;
  if (bool_check(s, [](const Expr& e) { return e.is<IsEmpty>(); })) return 10;
  if (const auto* c = s.as<Compare>()) {
    if (c->lhs->is<Size>()) return 11;
    if (c->lhs->is<AttrNav>()) return 12;
  }
  if (const auto* n = s.as<Includes>(); n && n->collection->is<AllInstances>()) return 13;
  if (const auto* n = s.as<Excludes>(); n && n->collection->is<AllInstances>()) return 14;
  if (bool_check(s, [](const Expr& e) { return e.is<IsUnique>(); })) return 15;
  return std::nullopt;
}

/// Assignment-shaped post conjuncts usable inside a forAll body.
std::optional<int> match_update(const Expr& s) {
  if (contains_opaque(s)) return std::nullopt;
  if (const auto* n = s.as<Includes>(); n && is_many_nav(*n->collection)) return 19;
  if (const auto* n = s.as<Excludes>(); n && is_many_nav(*n->collection)) return 20;
  if (const Compare* c = as_eq(s)) {
    if (is_one_nav(*c->lhs)) return c->rhs->is<NullLit>() ? 22 : 21;
    if (c->lhs->is<AttrNav>()) return 23;
  }
  return std::nullopt;
}

bool assignable(const Expr& lhs) {
  return is_session(lhs) || is_one_nav(lhs) || lhs.is<AttrNav>() || lhs.is<ResultRef>();
}

std::optional<int> match_post(const Expr& s) {
  if (const auto* let = s.as<LetIn>()) {
    const auto* isNew = let->body->as<OclIsNew>();
    const auto* v = isNew ? isNew->expr->as<VarRef>() : nullptr;
    if (v && v->name == let->name) return 16;
    return std::nullopt;
  }
  if (const auto* call = s.as<ExternalCall>()) {
    for (const auto& a : call->args) {
      if (contains_opaque(*a)) return std::nullopt;
    }
    return 26;
  }
  if (const Compare* c = as_eq(s)) {
    if (const auto* call = c->rhs->as<ExternalCall>(); call && assignable(*c->lhs) &&
                                                       !contains_opaque(*c->lhs)) {
      for (const auto& a : call->args) {
        if (contains_opaque(*a)) return std::nullopt;
      }
      return 26;
    }
  }
  if (contains_opaque(s)) return std::nullopt;
  if (const auto* n = s.as<Includes>(); n && n->collection->is<AllInstances>()) return 17;
  if (const auto* n = s.as<Excludes>(); n && n->collection->is<AllInstances>()) return 18;
  if (auto r = match_update(s)) return r;
  if (const Compare* c = as_eq(s)) {
    if (is_session(*c->lhs)) return 21;
    if (c->lhs->is<ResultRef>()) return 25;
  }
  if (const auto* f = s.as<ForAll>()) {
    std::vector<ExprPtr> body = split_conjuncts(f->body);
    bool ok = !body.empty() && std::all_of(body.begin(), body.end(), [](const ExprPtr& b) {
      return match_update(*b).has_value();
    });
    if (ok) return 24;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> match_rule(const Expr& subFormula, Section section) {
  switch (section) {
    case Section::Definition: return match_definition(subFormula);
    case Section::Pre: return match_pre(subFormula);
    case Section::Post: return match_post(subFormula);
  }
  return std::nullopt;
}

std::string to_string(const CompileError& e) {
  return std::to_string(e.location.line) + ":" + std::to_string(e.location.col) +
         ": compile error: " + e.message;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

[[noreturn]] void compile_fail(const Expr& e, const std::string& msg) {
  throw CompileFailure(CompileError{e.span.begin, msg});
}

void reject_post_only(const Expr& e, const char* section) {
  any_node(e, [&](const Expr& n) {
    if (n.is<AtPre>()) compile_fail(n, std::string("@pre is not allowed in the ") + section);
    if (n.is<OclIsNew>())
      compile_fail(n, std::string("oclIsNew() is not allowed in the ") + section);
    return false;
  });
}

/// Free names of an expression that a hook needs as arguments.
std::vector<ExprPtr> free_vars(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  std::set<std::string> seen;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& n) {
    if (const auto* v = n->as<VarRef>()) {
      if (v->kind != VarKind::Bound && seen.insert(v->name).second) out.push_back(n);
      return;
    }
    if (const auto* p = n->as<ParamRef>()) {
      if (seen.insert(p->name).second) out.push_back(n);
      return;
    }
    for (const auto& c : children(*n)) walk(c);
  };
  walk(e);
  return out;
}

class Compiler {
 public:
  Compiler(const Contract& c, const ResolvedModel& model)
      : model_(model), env_(model.env_for(c)) {
    op_.contract = c;
  }

  CompiledOperation run() {
    const Contract& c = op_.contract;
    for (const auto& d : c.definitions) reject_post_only(*d.expr, "definition section");
    if (c.precondition) reject_post_only(*c.precondition, "precondition");
    compile_definitions();
    compile_guard();
    compile_post();
    if (c.postcondition) op_.atPre = collect_at_pre(*c.postcondition);
    return std::move(op_);
  }

 private:
  std::string prefix() const {
    return "hook_" + op_.contract.useCase + "_" + op_.contract.signature.name + "_";
  }

  SemanticType type_or_opaque(const Expr& e) const {
    try {
      return type_of(e, env_);
    } catch (const TypeCheckError&) {
      return SemanticType::opaque();
    }
  }

  void add_hook(HookSpec hookSpec) {
    for (const auto& h : op_.hooks) {
      if (h.name == hookSpec.name) return;
    }
    op_.hooks.push_back(std::move(hookSpec));
  }

  /// Registers every non-evaluable node of a definition or guard conjunct.
  bool register_node_hooks(const Expr& e, const std::string& base) {
    int k = 0;
    bool found = false;
    std::function<void(const Expr&)> walk = [&](const Expr& n) {
      if (is_opaque(n)) {
        found = true;
        HookSpec hookSpec;
        if (const auto* call = n.as<ExternalCall>()) {
          hookSpec.name = call->service + "_" + call->op;
          for (const auto& a : call->args) hookSpec.paramTypes.push_back(type_or_opaque(*a));
        } else {
          const auto& oc = *n.as<OpCall>();
          hookSpec.name = base + (k ? "_" + std::to_string(k) : "");
          ++k;
          hookSpec.paramTypes.push_back(type_or_opaque(*oc.target));
          if (oc.boundVar.empty()) {
            for (const auto& a : oc.args) hookSpec.paramTypes.push_back(type_or_opaque(*a));
          }
        }
        hookSpec.returnType = SemanticType::opaque();
        hookSpec.origin = n.span;
        hookSpec.text = print_expr(n);
        op_.nodeHooks[&n] = hookSpec.name;
        add_hook(std::move(hookSpec));
        return;
      }
      for (const auto& c : children(n)) walk(*c);
    };
    walk(e);
    return found;
  }

  void compile_definitions() {
    int i = 0;
    for (const auto& d : op_.contract.definitions) {
      ++i;
      ExprPtr s = make_expr(Compare{CmpOp::Eq, make_expr(VarRef{d.name, VarKind::Definition},
                                                         d.expr->span), d.expr},
                            d.expr->span);
      std::optional<int> rule = match_rule(*s, Section::Definition);
      bool hooked = register_node_hooks(*d.expr, prefix() + "def" + std::to_string(i));
      op_.definitionTrace.push_back(
          {i, hooked ? "HOOK" : rule ? "R" + std::to_string(*rule) : "EVAL", d.expr->span});
      op_.definitionPlan.push_back(definition_instruction(d, rule));
    }
  }

  static Instruction definition_instruction(const Definition& d, std::optional<int> rule) {
    const Expr& r = *d.expr;
    if (rule) {
      switch (*rule) {
        case 1: return {instr::FindObjects{d.name, r.as<AllInstances>()->className, {}, nullptr}};
        case 2: {
          const auto& sel = *r.as<Select>();
          return {instr::FindObjects{d.name, sel.collection->as<AllInstances>()->className,
                                     sel.boundVar, sel.cond}};
        }
        case 3: {
          const auto& any = *r.as<Any>();
          return {instr::FindObject{d.name, any.collection->as<AllInstances>()->className,
                                    any.boundVar, any.cond}};
        }
        case 4: {
          const auto& nav = *r.as<AssocNav>();
          return {instr::FindLinked{d.name, nav.object, nav.role, {}, nullptr}};
        }
        case 5: {
          const auto& nav = *r.as<AssocNav>();
          return {instr::FindLinkedMany{d.name, nav.object, nav.role, {}, nullptr}};
        }
        case 6: {
          const auto& sel = *r.as<Select>();
          const auto& nav = *sel.collection->as<AssocNav>();
          return {instr::FindLinkedMany{d.name, nav.object, nav.role, sel.boundVar, sel.cond}};
        }
        case 7: {
          const auto& any = *r.as<Any>();
          const auto& nav = *any.collection->as<AssocNav>();
          return {instr::FindLinked{d.name, nav.object, nav.role, any.boundVar, any.cond}};
        }
        default: break;
      }
    }
    if (const auto* a = r.as<AttrNav>(); a && !contains_opaque(r))
      return {instr::GetAttr{d.name, a->object, a->attr}};
    return {instr::EvalToTemp{d.name, d.expr}};
  }

  void compile_guard() {
    const Contract& c = op_.contract;
    op_.guard = c.precondition;
    if (!c.precondition) return;
    op_.guardText = print_expr(*c.precondition);
    int i = 0;
    for (const auto& conj : split_conjuncts(c.precondition)) {
      ++i;
      std::optional<int> rule = match_rule(*conj, Section::Pre);
      bool hooked = register_node_hooks(*conj, prefix() + "pre" + std::to_string(i));
      op_.guardTrace.push_back(
          {i, hooked ? "HOOK" : rule ? "R" + std::to_string(*rule) : "EVAL", conj->span});
    }
  }

  void check_forward_refs(const std::vector<ExprPtr>& conjuncts) {
    std::map<std::string, std::size_t> letAt;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      any_node(*conjuncts[i], [&](const Expr& n) {
        if (const auto* l = n.as<LetIn>()) letAt.emplace(l->name, i);
        return false;
      });
    }
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      any_node(*conjuncts[i], [&](const Expr& n) {
        const auto* v = n.as<VarRef>();
        if (v && v->kind == VarKind::Session) {
          auto it = letAt.find(v->name);
          if (it != letAt.end() && it->second > i)
            compile_fail(n, "'" + v->name + "' is used before its let binding");
        }
        return false;
      });
    }
  }

  void compile_post() {
    std::vector<ExprPtr> conjuncts = split_conjuncts(op_.contract.postcondition);
    check_forward_refs(conjuncts);
    int i = 0;
    for (const auto& conj : conjuncts) {
      ++i;
      if (const Compare* c = as_eq(*conj); c && is_literal(*c->lhs) && is_literal(*c->rhs))
        compile_fail(*conj, "equality between two literals has no assignment reading");
      std::optional<int> rule = match_rule(*conj, Section::Post);
      std::string tag;
      if (!rule) {
        tag = "HOOK";
        emit_hook(conj, i, op_.postPlan);
      } else {
        tag = "R" + std::to_string(*rule);
        if (*rule == 21 && is_session(*as_eq(*conj)->lhs)) tag += "*";
        emit_post(conj, *rule, i, op_.postPlan);
      }
      op_.ruleTrace.push_back({i, tag, conj->span});
    }
  }

  static void assign(const Expr& lhs, ExprPtr value, InstructionList& out) {
    if (const auto* v = lhs.as<VarRef>(); v && v->kind == VarKind::Session) {
      out.push_back({instr::BindSession{v->name, std::move(value)}});
    } else if (const auto* n = lhs.as<AssocNav>()) {
      out.push_back({instr::LinkOne{n->object, n->role, std::move(value)}});
    } else if (const auto* a = lhs.as<AttrNav>()) {
      out.push_back({instr::SetAttr{a->object, a->attr, std::move(value)}});
    } else if (lhs.is<ResultRef>()) {
      out.push_back({instr::Return{std::move(value)}});
    }
  }

  static ExprPtr temp_ref(const std::string& name, SourceSpan span) {
    return make_expr(VarRef{name, VarKind::Definition}, span);
  }

  void emit_post(const ExprPtr& conj, int rule, int index, InstructionList& out) {
    const Expr& s = *conj;
    switch (rule) {
      case 16: {
        const auto& let = *s.as<LetIn>();
        out.push_back({instr::Create{let.name, let.className}});
        return;
      }
      case 17: {
        const auto& n = *s.as<Includes>();
        out.push_back({instr::Add{n.collection->as<AllInstances>()->className, n.element}});
        return;
      }
      case 18: {
        const auto& n = *s.as<Excludes>();
        out.push_back({instr::Release{n.collection->as<AllInstances>()->className, n.element}});
        return;
      }
      case 19: {
        const auto& n = *s.as<Includes>();
        const auto& nav = *n.collection->as<AssocNav>();
        out.push_back({instr::LinkMany{nav.object, nav.role, n.element}});
        return;
      }
      case 20: {
        const auto& n = *s.as<Excludes>();
        const auto& nav = *n.collection->as<AssocNav>();
        out.push_back({instr::UnlinkMany{nav.object, nav.role, n.element}});
        return;
      }
      case 21:
      case 23:
      case 25: {
        const Compare& c = *as_eq(s);
        assign(*c.lhs, c.rhs, out);
        return;
      }
      case 22: {
        const auto& nav = *as_eq(s)->lhs->as<AssocNav>();
        out.push_back({instr::UnlinkOne{nav.object, nav.role}});
        return;
      }
      case 24: {
        const auto& f = *s.as<ForAll>();
        instr::ForEach loop{f.collection, f.boundVar, {}};
        for (const auto& b : split_conjuncts(f.body)) {
          emit_post(b, *match_update(*b), index, loop.body);
        }
        out.push_back({std::move(loop)});
        return;
      }
      case 26: {
        const Compare* c = as_eq(s);
        const auto& call = c ? *c->rhs->as<ExternalCall>() : *s.as<ExternalCall>();
        HookSpec hookSpec{call.service + "_" + call.op, {}, std::nullopt, s.span, print_expr(s)};
        for (const auto& a : call.args) hookSpec.paramTypes.push_back(type_or_opaque(*a));
        if (c) hookSpec.returnType = type_or_opaque(*c->lhs);
        std::optional<std::string> dest;
        if (c) dest = "$h" + std::to_string(index);
        out.push_back({instr::CallHook{hookSpec.name, call.args, dest}});
        if (c) assign(*c->lhs, temp_ref(*dest, c->rhs->span), out);
        add_hook(std::move(hookSpec));
        return;
      }
      default: break;
    }
  }

  void emit_hook(const ExprPtr& conj, int index, InstructionList& out) {
    HookSpec hookSpec;
    hookSpec.name = prefix() + std::to_string(index);
    hookSpec.origin = conj->span;
    hookSpec.text = print_expr(*conj);
    const Compare* c = as_eq(*conj);
    bool assigns = c && assignable(*c->lhs);
    std::vector<ExprPtr> args = free_vars(assigns ? c->rhs : conj);
    for (const auto& a : args) hookSpec.paramTypes.push_back(type_or_opaque(*a));
    std::optional<std::string> dest;
    if (assigns) {
      hookSpec.returnType = type_or_opaque(*c->lhs);
      dest = "$h" + std::to_string(index);
    }
    out.push_back({instr::CallHook{hookSpec.name, args, dest}});
    if (assigns) assign(*c->lhs, temp_ref(*dest, c->rhs->span), out);
    add_hook(std::move(hookSpec));
  }

  const ResolvedModel& model_;
  TypeEnv env_;
  CompiledOperation op_;
};

}  // namespace

CompiledOperation compile_contract(const Contract& contract, const ResolvedModel& model) {
  return Compiler(contract, model).run();
}

CompileResult compile_model(const ResolvedModel& model) {
  CompileResult out;
  for (const auto& c : model.model().contracts) {
    try {
      out.operations.push_back(compile_contract(c, model));
    } catch (const CompileFailure& e) {
      out.errors.push_back(e.error());
    }
  }
  return out;
}

int ExecutabilityReport::executable() const {
  return static_cast<int>(std::count_if(operations.begin(), operations.end(),
                                        [](const OperationStatus& s) { return s.executable; }));
}

double ExecutabilityReport::success_rate() const {
  if (operations.empty()) return 100.0;
  return 100.0 * executable() / total();
}

ExecutabilityReport analyze_executability(const std::vector<CompiledOperation>& ops) {
  ExecutabilityReport r;
  for (const auto& op : ops) {
    OperationStatus s{op.useCase(), op.signature().name, op.executable(), {}};
    for (const auto& h : op.hooks) s.hooks.push_back(h.name);
    r.operations.push_back(std::move(s));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const TraceEntry& t) {
  return "#" + std::to_string(t.index) + " " + t.rule + " " + to_string(t.span);
}

std::string print_trace(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& t : trace) out += to_string(t) + "\n";
  return out;
}

namespace {

std::string filter(const std::string& var, const ExprPtr& cond) {
  if (!cond) return "";
  return " where " + var + " | " + print_expr(*cond);
}

std::string nav(const ExprPtr& obj, const std::string& feature) {
  return print_expr(*obj) + "." + feature;
}

}  // namespace

std::string print_instruction(const Instruction& ins, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  return pad + std::visit(
                   [&](const auto& n) -> std::string {
                     using T = std::decay_t<decltype(n)>;
                     using namespace instr;
                     if constexpr (std::is_same_v<T, FindObject>)
                       return "find-object " + n.dest + " <- " + n.className +
                              filter(n.boundVar, n.cond);
                     else if constexpr (std::is_same_v<T, FindObjects>)
                       return "find-objects " + n.dest + " <- " + n.className +
                              filter(n.boundVar, n.cond);
                     else if constexpr (std::is_same_v<T, FindLinked>)
                       return "find-linked " + n.dest + " <- " + nav(n.source, n.role) +
                              filter(n.boundVar, n.cond);
                     else if constexpr (std::is_same_v<T, FindLinkedMany>)
                       return "find-linked-many " + n.dest + " <- " + nav(n.source, n.role) +
                              filter(n.boundVar, n.cond);
                     else if constexpr (std::is_same_v<T, GetAttr>)
                       return "get-attr " + n.dest + " <- " + nav(n.source, n.attr);
                     else if constexpr (std::is_same_v<T, EvalToTemp>)
                       return "eval " + n.dest + " <- " + print_expr(*n.expr);
                     else if constexpr (std::is_same_v<T, Create>)
                       return "create " + n.dest + " : " + n.className;
                     else if constexpr (std::is_same_v<T, Add>)
                       return "add " + n.className + " " + print_expr(*n.src);
                     else if constexpr (std::is_same_v<T, Release>)
                       return "release " + n.className + " " + print_expr(*n.src);
                     else if constexpr (std::is_same_v<T, SetAttr>)
                       return "set-attr " + nav(n.src, n.attr) + " <- " + print_expr(*n.value);
                     else if constexpr (std::is_same_v<T, LinkOne>)
                       return "link-one " + nav(n.src, n.role) + " <- " + print_expr(*n.target);
                     else if constexpr (std::is_same_v<T, LinkMany>)
                       return "link-many " + nav(n.src, n.role) + " <- " + print_expr(*n.target);
                     else if constexpr (std::is_same_v<T, UnlinkOne>)
                       return "unlink-one " + nav(n.src, n.role);
                     else if constexpr (std::is_same_v<T, UnlinkMany>)
                       return "unlink-many " + nav(n.src, n.role) + " " + print_expr(*n.target);
                     else if constexpr (std::is_same_v<T, ForEach>) {
                       std::string s = "for-each " + n.boundVar + " in " + print_expr(*n.collection);
                       for (const auto& b : n.body) s += "\n" + print_instruction(b, indent + 1);
                       return s;
                     } else if constexpr (std::is_same_v<T, BindSession>)
                       return "bind-session " + n.name + " <- " + print_expr(*n.value);
                     else if constexpr (std::is_same_v<T, CallHook>) {
                       std::string s = "call-hook " + n.hook + "(";
                       for (std::size_t i = 0; i < n.args.size(); ++i) {
                         if (i) s += ", ";
                         s += print_expr(*n.args[i]);
                       }
                       s += ")";
                       if (n.dest) s += " -> " + *n.dest;
                       return s;
                     } else
                       return "return " + print_expr(*n.value);
                   },
                   ins.node);
}

std::string print_plan(const InstructionList& plan) {
  std::string out;
  for (const auto& ins : plan) out += print_instruction(ins) + "\n";
  return out;
}

}  // namespace reqexec
