#include "reqexec/executor.hpp"

#include <algorithm>

#include "reqexec/printer.hpp"

namespace reqexec {

bool InvariantReport::all_hold() const {
  return std::all_of(results.begin(), results.end(),
                     [](const InvariantResult& r) { return r.holds; });
}

const InvariantResult* InvariantReport::find(std::string_view name) const {
  for (const auto& r : results) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const char* outcome_kind(const Outcome& o) {
  switch (o.index()) {
    case 0: return "ok";
    case 1: return "precondition_violated";
    case 2: return "hook_unbound";
    default: return "fault";
  }
}

std::string to_string(const Outcome& o) {
  if (const auto* ok = std::get_if<outcome::Ok>(&o)) return "ok " + to_string(ok->returnValue);
  if (const auto* p = std::get_if<outcome::PreconditionViolated>(&o))
    return "precondition violated: " + p->guardText;
  if (const auto* h = std::get_if<outcome::HookUnbound>(&o)) return "hook unbound: " + h->hookName;
  return "fault: " + std::get<outcome::RuntimeFault>(o).message;
}

const HookFn* HookRegistry::find(const std::string& name) const {
  auto it = hooks_.find(name);
  return it == hooks_.end() ? nullptr : &it->second;
}

namespace {

struct HookMissing {
  std::string name;
};

class PlanRunner {
 public:
  PlanRunner(ObjectStore& store, const HookRegistry& hooks, EvalContext& ctx)
      : store_(store), hooks_(hooks), ctx_(ctx) {}

  void run(const InstructionList& plan) {
    for (const auto& ins : plan) step(ins);
  }

  Value call_hook(const std::string& name, const std::vector<Value>& args) {
    const HookFn* fn = hooks_.find(name);
    if (!fn) throw HookMissing{name};
    try {
      return (*fn)(args, store_);
    } catch (const EvalFault&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalFault("hook " + name + " failed: " + e.what());
    }
  }

  std::optional<Value> returned;

 private:
  Value eval(const ExprPtr& e) { return evaluate(e, ctx_); }

  ObjectId live(const ExprPtr& e, const char* what) {
    Value v = eval(e);
    if (!v.is_ref() || !store_.exists(v.as_ref()))
      throw EvalFault(std::string(what) + ": '" + print_expr(*e) + "' is not a live object");
    return v.as_ref();
  }

  ObjectPredicate predicate(const std::string& var, const ExprPtr& cond) {
    if (!cond) return {};
    return [this, var, cond](ObjectId id) {
      auto saved = ctx_.bound;
      ctx_.bound[var] = Value::ref(id);
      std::optional<bool> t = truth(evaluate(*cond, ctx_));
      ctx_.bound = std::move(saved);
      return t && *t;
    };
  }

  void step(const Instruction& ins) {
    using namespace instr;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FindObject>) {
            ObjectPredicate p = predicate(n.boundVar, n.cond);
            ctx_.definitions[n.dest] =
                store_.find_object(n.className, p);
          } else if constexpr (std::is_same_v<T, FindObjects>) {
            ctx_.definitions[n.dest] =
                Value::refs(store_.find_objects(n.className, predicate(n.boundVar, n.cond)));
          } else if constexpr (std::is_same_v<T, FindLinked>) {
            Value src = eval(n.source);
            Value out;
            if (src.is_ref() && store_.exists(src.as_ref()))
              out = store_.find_linked_object(src.as_ref(), n.role, predicate(n.boundVar, n.cond));
            ctx_.definitions[n.dest] = out;
          } else if constexpr (std::is_same_v<T, FindLinkedMany>) {
            Value src = eval(n.source);
            Value out;
            if (src.is_ref() && store_.exists(src.as_ref()))
              out = Value::refs(
                  store_.find_linked_objects(src.as_ref(), n.role, predicate(n.boundVar, n.cond)));
            ctx_.definitions[n.dest] = out;
          } else if constexpr (std::is_same_v<T, GetAttr>) {
            Value src = eval(n.source);
            Value out;
            if (src.is_ref() && store_.exists(src.as_ref()))
              out = store_.get_attribute(src.as_ref(), n.attr);
            ctx_.definitions[n.dest] = out;
          } else if constexpr (std::is_same_v<T, EvalToTemp>) {
            ctx_.definitions[n.dest] = eval(n.expr);
          } else if constexpr (std::is_same_v<T, Create>) {
            ctx_.lets[n.dest] = store_.create_object(n.className);
          } else if constexpr (std::is_same_v<T, Add>) {
            store_.add_object(n.className, live(n.src, "add"));
          } else if constexpr (std::is_same_v<T, Release>) {
            store_.release_object(n.className, live(n.src, "release"));
          } else if constexpr (std::is_same_v<T, SetAttr>) {
            ObjectId obj = live(n.src, "set-attr");
            store_.set_attribute(obj, n.attr, eval(n.value));
          } else if constexpr (std::is_same_v<T, LinkOne>) {
            ObjectId obj = live(n.src, "link-one");
            Value target = eval(n.target);
            if (target.is_undefined()) store_.remove_link_one_to_one(obj, n.role);
            else store_.add_link_one_to_one(obj, n.role, live(n.target, "link-one target"));
          } else if constexpr (std::is_same_v<T, LinkMany>) {
            ObjectId obj = live(n.src, "link-many");
            store_.add_link_one_to_many(obj, n.role, live(n.target, "link-many target"));
          } else if constexpr (std::is_same_v<T, UnlinkOne>) {
            store_.remove_link_one_to_one(live(n.src, "unlink-one"), n.role);
          } else if constexpr (std::is_same_v<T, UnlinkMany>) {
            ObjectId obj = live(n.src, "unlink-many");
            Value target = eval(n.target);
            if (target.is_ref()) store_.remove_link_one_to_many(obj, n.role, target.as_ref());
          } else if constexpr (std::is_same_v<T, ForEach>) {
            Value coll = eval(n.collection);
            if (!coll.is_refs())
              throw EvalFault("for-each over undefined '" + print_expr(*n.collection) + "'");
            auto saved = ctx_.bound;
            for (ObjectId id : coll.as_refs().ids()) {
              ctx_.bound[n.boundVar] = Value::ref(id);
              run(n.body);
            }
            ctx_.bound = std::move(saved);
          } else if constexpr (std::is_same_v<T, BindSession>) {
            ctx_.session[n.name] = eval(n.value);
          } else if constexpr (std::is_same_v<T, CallHook>) {
            std::vector<Value> args;
            for (const auto& a : n.args) args.push_back(eval(a));
            Value r = call_hook(n.hook, args);
            if (n.dest) ctx_.definitions[*n.dest] = r;
          } else {
            returned = eval(n.value);
          }
        },
        ins.node);
  }

  ObjectStore& store_;
  const HookRegistry& hooks_;
  EvalContext& ctx_;
};

void check_args(const CompiledOperation& op, const std::vector<Value>& args,
                std::map<std::string, Value>& out) {
  const auto& params = op.signature().params;
  const std::string name = op.useCase() + "::" + op.signature().name;
  if (args.size() != params.size()) {
    throw InvocationError(InvocationError::Kind::ArityMismatch,
                          name + " expects " + std::to_string(params.size()) + " argument(s), got " +
                              std::to_string(args.size()));
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].is_undefined() || !conforms(args[i], params[i].type)) {
      throw InvocationError(InvocationError::Kind::TypeMismatch,
                            name + " parameter " + params[i].name + " expects " +
                                to_string(params[i].type) + ", got " + type_name(args[i]));
    }
    out[params[i].name] = coerce(args[i], params[i].type);
  }
}

}  // namespace

Executor::Executor(std::shared_ptr<const ResolvedModel> model, std::vector<CompiledOperation> ops)
    : model_(std::move(model)), ops_(std::move(ops)), store_(model_->schema_ptr()) {}

const CompiledOperation* Executor::find(std::string_view useCase, std::string_view op) const {
  for (const auto& o : ops_) {
    if (o.useCase() == useCase && o.signature().name == op) return &o;
  }
  return nullptr;
}

Session Executor::open_session(const std::string& useCase) const {
  if (!model_->model().find_use_case(useCase))
    throw InvocationError(InvocationError::Kind::UnknownUseCase, "unknown use case " + useCase);
  return Session{useCase, {}};
}

Outcome Executor::invoke(Session& session, const std::string& opName,
                         const std::vector<Value>& args, InvocationTrace* trace) {
  const CompiledOperation* op = find(session.useCase, opName);
  if (!op) {
    throw InvocationError(InvocationError::Kind::UnknownOperation,
                          "use case " + session.useCase + " has no operation " + opName);
  }
  EvalContext ctx;
  check_args(*op, args, ctx.params);

  const ObjectStore snapshot = store_;
  ctx.store = &store_;
  ctx.session = session.bindings;
  ctx.tolerance = tolerance_;
  PlanRunner runner(store_, hooks_, ctx);
  ctx.opaque = [&](const Expr& e, EvalContext& c) -> Value {
    auto it = op->nodeHooks.find(&e);
    if (it == op->nodeHooks.end()) throw NotEvaluable("no hook answers '" + print_expr(e) + "'");
    std::vector<Value> hookArgs;
    if (const auto* call = e.as<ast::ExternalCall>()) {
      for (const auto& a : call->args) hookArgs.push_back(evaluate(a, c));
    } else {
      const auto& oc = *e.as<ast::OpCall>();
      hookArgs.push_back(evaluate(oc.target, c));
      if (oc.boundVar.empty()) {
        for (const auto& a : oc.args) hookArgs.push_back(evaluate(a, c));
      }
    }
    return runner.call_hook(it->second, hookArgs);
  };

  auto rollback = [&] { store_ = snapshot; };
  try {
    runner.run(op->definitionPlan);
    std::optional<bool> ok = truth(evaluate(op->guard, ctx));
    if (!ok || !*ok) {
      rollback();
      return outcome::PreconditionViolated{op->guardText};
    }
    std::map<const Expr*, Value> captured;
    for (const Expr* e : op->atPre) {
      captured[e] = evaluate(*e->as<ast::AtPre>()->expr, ctx);
    }
    ctx.captured = &captured;
    ctx.preStore = &snapshot;
    ctx.strict = true;
    runner.run(op->postPlan);
  } catch (const HookMissing& h) {
    rollback();
    return outcome::HookUnbound{h.name};
  } catch (const EvalFault& e) {
    rollback();
    return outcome::RuntimeFault{e.what()};
  } catch (const StoreError& e) {
    rollback();
    return outcome::RuntimeFault{e.what()};
  }

  session.bindings = ctx.session;
  Value ret = runner.returned.value_or(Value::undefined());
  if (trace) {
    trace->preStore = snapshot;
    trace->params = ctx.params;
    trace->definitions = ctx.definitions;
    trace->lets = ctx.lets;
    trace->session = ctx.session;
    trace->result = ret;
  }
  return outcome::Ok{ret, check_invariants()};
}

InvariantReport Executor::check_invariants() const {
  return reqexec::check_invariants(*model_, store_, tolerance_);
}

InvariantReport check_invariants(const ResolvedModel& model, const ObjectStore& store,
                                 double tolerance) {
  InvariantReport report;
  for (const auto& inv : model.model().invariants) {
    InvariantResult r{inv.name, true, {}, std::nullopt};
    auto holds = [&](std::optional<Value> self) {
      EvalContext ctx;
      ctx.store = &store;
      ctx.tolerance = tolerance;
      ctx.self = std::move(self);
      try {
        std::optional<bool> t = truth(evaluate(inv.expr, ctx));
        return t && *t;
      } catch (const EvalFault& e) {
        r.fault = e.what();
        return false;
      }
    };
    if (inv.contextClass) {
      RefSet instances = store.all_instances(*inv.contextClass);
      for (ObjectId id : instances.ids()) {
        if (!holds(Value::ref(id))) r.witnesses.push_back(id);
      }
      r.holds = r.witnesses.empty();
    } else {
      r.holds = holds(std::nullopt);
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

bool verify_postcondition(const CompiledOperation& op, const ObjectStore& pre,
                          const ObjectStore& post, const InvocationTrace& bindings,
                          double tolerance) {
  EvalContext ctx;
  ctx.store = &post;
  ctx.preStore = &pre;
  ctx.params = bindings.params;
  ctx.definitions = bindings.definitions;
  ctx.lets = bindings.lets;
  ctx.session = bindings.session;
  ctx.result = bindings.result;
  ctx.tolerance = tolerance;
  try {
    std::optional<bool> t = truth(evaluate(op.contract.postcondition, ctx));
    return t && *t;
  } catch (const EvalFault&) {
    return false;
  }
}

}  // namespace reqexec
