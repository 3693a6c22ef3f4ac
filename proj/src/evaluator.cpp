#include "reqexec/evaluator.hpp"

#include <algorithm>
#include <cmath>

namespace reqexec {

std::optional<bool> truth(const Value& v) {
  if (v.is_bool()) return v.as_bool();
  return std::nullopt;
}

std::optional<bool> compare_values(ast::CmpOp op, const Value& a, const Value& b,
                                   double tolerance) {
  using ast::CmpOp;
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) {
      std::int64_t x = a.as_int(), y = b.as_int();
      switch (op) {
        case CmpOp::Eq: return x == y;
        case CmpOp::Ne: return x != y;
        case CmpOp::Lt: return x < y;
        case CmpOp::Le: return x <= y;
        case CmpOp::Gt: return x > y;
        case CmpOp::Ge: return x >= y;
      }
    }
    double x = a.as_number(), y = b.as_number();
    switch (op) {
      case CmpOp::Eq: return std::fabs(x - y) <= tolerance;
      case CmpOp::Ne: return std::fabs(x - y) > tolerance;
      case CmpOp::Lt: return x < y - tolerance;
      case CmpOp::Le: return x <= y + tolerance;
      case CmpOp::Gt: return x > y + tolerance;
      case CmpOp::Ge: return x >= y - tolerance;
    }
  }
  if (a.is_string() && b.is_string()) {
    int c = a.as_string().compare(b.as_string());
    switch (op) {
      case CmpOp::Eq: return c == 0;
      case CmpOp::Ne: return c != 0;
      case CmpOp::Lt: return c < 0;
      case CmpOp::Le: return c <= 0;
      case CmpOp::Gt: return c > 0;
      case CmpOp::Ge: return c >= 0;
    }
  }
  if (op != CmpOp::Eq && op != CmpOp::Ne) return std::nullopt;
  bool eq;
  if (a.is_refs() && b.is_refs()) {
    const auto& x = a.as_refs();
    const auto& y = b.as_refs();
    eq = x.size() == y.size() &&
         std::all_of(x.ids().begin(), x.ids().end(), [&](ObjectId id) { return y.contains(id); });
  } else {
    eq = a == b;
  }
  return op == CmpOp::Eq ? eq : !eq;
}

namespace {

using namespace ast;

class Evaluator {
 public:
  explicit Evaluator(EvalContext& ctx) : ctx_(ctx) {}

  Value go(const Expr& e) {
    if (const auto* n = e.as<IntLit>()) return Value::integer(n->value);
    if (const auto* n = e.as<RealLit>()) return Value::real(n->value);
    if (const auto* n = e.as<StrLit>()) return Value::string(n->value);
    if (const auto* n = e.as<BoolLit>()) return Value::boolean(n->value);
    if (e.is<NullLit>()) return Value::undefined();
    if (const auto* n = e.as<VarRef>()) return var(*n);
    if (e.is<SelfRef>()) return ctx_.self.value_or(Value::undefined());
    if (e.is<ResultRef>()) return ctx_.result.value_or(Value::undefined());
    if (const auto* n = e.as<ParamRef>()) return lookup(ctx_.params, n->name);
    if (const auto* n = e.as<AttrNav>()) {
      Value obj = go(*n->object);
      if (!live(obj)) return Value::undefined();
      return store().get_attribute(obj.as_ref(), n->attr);
    }
    if (const auto* n = e.as<AssocNav>()) {
      Value obj = go(*n->object);
      if (!live(obj)) return Value::undefined();
      if (n->multiplicity == Multiplicity::Many)
        return Value::refs(store().find_linked_objects(obj.as_ref(), n->role));
      return store().find_linked_object(obj.as_ref(), n->role);
    }
    if (const auto* n = e.as<AtPre>()) return at_pre(e, *n);
    if (const auto* n = e.as<AllInstances>()) return Value::refs(store().all_instances(n->className));
    if (const auto* n = e.as<Any>()) {
      Value coll = go(*n->collection);
      if (!coll.is_refs()) return Value::undefined();
      for (ObjectId id : coll.as_refs().ids()) {
        if (holds(n->boundVar, id, *n->cond)) return Value::ref(id);
      }
      return Value::undefined();
    }
    if (const auto* n = e.as<Select>()) {
      Value coll = go(*n->collection);
      if (!coll.is_refs()) return Value::undefined();
      RefSet out;
      for (ObjectId id : coll.as_refs().ids()) {
        if (holds(n->boundVar, id, *n->cond)) out.insert(id);
      }
      return Value::refs(std::move(out));
    }
    if (const auto* n = e.as<ForAll>()) {
      Value coll = go(*n->collection);
      if (!coll.is_refs()) return Value::undefined();
      bool unknown = false;
      for (ObjectId id : coll.as_refs().ids()) {
        std::optional<bool> t = truth(with_bound(n->boundVar, Value::ref(id), *n->body));
        if (t && !*t) return Value::boolean(false);
        if (!t) unknown = true;
      }
      return unknown ? Value::undefined() : Value::boolean(true);
    }
    if (const auto* n = e.as<Includes>()) return member(*n->collection, *n->element, true);
    if (const auto* n = e.as<Excludes>()) return member(*n->collection, *n->element, false);
    if (const auto* n = e.as<Size>()) {
      Value coll = go(*n->collection);
      if (!coll.is_refs()) return Value::undefined();
      return Value::integer(static_cast<std::int64_t>(coll.as_refs().size()));
    }
    if (const auto* n = e.as<IsEmpty>()) {
      Value coll = go(*n->collection);
      if (!coll.is_refs()) return Value::undefined();
      return Value::boolean(coll.as_refs().empty());
    }
    if (const auto* n = e.as<IsUnique>()) return is_unique(*n);
    if (const auto* n = e.as<OclIsNew>()) {
      Value v = go(*n->expr);
      if (!v.is_ref()) return Value::boolean(false);
      if (!ctx_.preStore) return Value::boolean(false);
      return Value::boolean(!ctx_.preStore->exists(v.as_ref()));
    }
    if (const auto* n = e.as<OclIsUndefined>()) {
      Value v = go(*n->expr);
      return Value::boolean(v.is_undefined() || (v.is_ref() && !store().exists(v.as_ref())));
    }
    if (const auto* n = e.as<OclIsTypeOf>()) {
      Value v = go(*n->expr);
      if (v.is_ref()) {
        const ObjectRecord* rec = store().record(v.as_ref());
        return Value::boolean(rec && rec->className == n->typeName);
      }
      if (v.is_undefined()) return Value::boolean(false);
      return Value::boolean(n->typeName == type_name(v));
    }
    if (const auto* n = e.as<LetIn>()) {
      if (!ctx_.lets.count(n->name)) ctx_.lets[n->name] = Value::undefined();
      return go(*n->body);
    }
    if (const auto* n = e.as<And>()) {
      std::optional<bool> l = truth(go(*n->lhs));
      if (l && !*l) return Value::boolean(false);
      std::optional<bool> r = truth(go(*n->rhs));
      if (r && !*r) return Value::boolean(false);
      if (l && r) return Value::boolean(true);
      return Value::undefined();
    }
    if (const auto* n = e.as<Or>()) {
      std::optional<bool> l = truth(go(*n->lhs));
      if (l && *l) return Value::boolean(true);
      std::optional<bool> r = truth(go(*n->rhs));
      if (r && *r) return Value::boolean(true);
      if (l && r) return Value::boolean(false);
      return Value::undefined();
    }
    if (const auto* n = e.as<Not>()) {
      std::optional<bool> t = truth(go(*n->expr));
      return t ? Value::boolean(!*t) : Value::undefined();
    }
    if (const auto* n = e.as<Compare>()) return compare(*n);
    if (const auto* n = e.as<Arith>()) return arith(*n);
    if (ctx_.opaque && (e.is<ExternalCall>() || e.is<OpCall>())) return ctx_.opaque(e, ctx_);
    if (const auto* n = e.as<ExternalCall>())
      throw NotEvaluable("external call " + n->service + "::" + n->op + " is not evaluable");
    if (const auto* n = e.as<OpCall>())
      throw NotEvaluable("operation '" + n->op + "' is not evaluable");
    throw EvalFault("unsupported expression");
  }

 private:
  const ObjectStore& store() const {
    if (!ctx_.store) throw EvalFault("no object store");
    return *ctx_.store;
  }

  bool live(const Value& v) const { return v.is_ref() && store().exists(v.as_ref()); }

  static Value lookup(const std::map<std::string, Value>& m, const std::string& name) {
    auto it = m.find(name);
    return it == m.end() ? Value::undefined() : it->second;
  }

  Value var(const VarRef& v) {
    switch (v.kind) {
      case VarKind::Bound: return lookup(ctx_.bound, v.name);
      case VarKind::Let: return lookup(ctx_.lets, v.name);
      case VarKind::Definition: return lookup(ctx_.definitions, v.name);
      case VarKind::Session: return lookup(ctx_.session, v.name);
      case VarKind::Unresolved: break;
    }
    throw EvalFault("unresolved name '" + v.name + "'");
  }

  Value with_bound(const std::string& name, Value v, const Expr& body) {
    auto it = ctx_.bound.find(name);
    std::optional<Value> saved;
    if (it != ctx_.bound.end()) saved = it->second;
    ctx_.bound[name] = std::move(v);
    Value r = go(body);
    if (saved) ctx_.bound[name] = *saved;
    else ctx_.bound.erase(name);
    return r;
  }

  bool holds(const std::string& var, ObjectId id, const Expr& cond) {
    std::optional<bool> t = truth(with_bound(var, Value::ref(id), cond));
    return t && *t;
  }

  Value at_pre(const Expr& e, const AtPre& n) {
    if (ctx_.captured) {
      auto it = ctx_.captured->find(&e);
      if (it != ctx_.captured->end()) return it->second;
    }
    if (!ctx_.preStore) return go(*n.expr);
    const ObjectStore* current = ctx_.store;
    ctx_.store = ctx_.preStore;
    try {
      Value v = go(*n.expr);
      ctx_.store = current;
      return v;
    } catch (...) {
      ctx_.store = current;
      throw;
    }
  }

  Value member(const Expr& collection, const Expr& element, bool includes) {
    Value coll = go(collection);
    Value el = go(element);
    if (!coll.is_refs()) return Value::undefined();
    bool found = el.is_ref() && coll.as_refs().contains(el.as_ref());
    return Value::boolean(includes ? found : !found);
  }

  Value is_unique(const IsUnique& n) {
    RefSet all = store().all_instances(n.className);
    std::vector<Value> seen;
    for (ObjectId id : all.ids()) {
      Value v = store().get_attribute(id, n.attr);
      for (const Value& s : seen) {
        bool dup = (v.is_undefined() && s.is_undefined()) ||
                   (!v.is_undefined() && !s.is_undefined() &&
                    values_equal(v, s, ctx_.tolerance));
        if (dup) return Value::boolean(false);
      }
      seen.push_back(std::move(v));
    }
    return Value::boolean(true);
  }

  Value compare(const Compare& c) {
    Value l = go(*c.lhs);
    Value r = go(*c.rhs);
    bool nullCheck = c.lhs->is<NullLit>() || c.rhs->is<NullLit>();
    if (nullCheck && (c.op == CmpOp::Eq || c.op == CmpOp::Ne)) {
      bool lu = l.is_undefined() || (l.is_ref() && !store().exists(l.as_ref()));
      bool ru = r.is_undefined() || (r.is_ref() && !store().exists(r.as_ref()));
      bool eq = lu && ru;
      return Value::boolean(c.op == CmpOp::Eq ? eq : !eq);
    }
    if (l.is_undefined() && r.is_undefined() && (c.op == CmpOp::Eq || c.op == CmpOp::Ne))
      return Value::boolean(c.op == CmpOp::Eq);
    if (l.is_undefined() || r.is_undefined()) return Value::undefined();
    std::optional<bool> res = compare_values(c.op, l, r, ctx_.tolerance);
    if (!res) throw EvalFault("cannot order " + to_string(l) + " against " + to_string(r));
    return Value::boolean(*res);
  }

  Value undefined_arith(const char* why) {
    if (ctx_.strict) throw EvalFault(why);
    return Value::undefined();
  }

  Value arith(const Arith& a) {
    Value l = go(*a.lhs);
    Value r = go(*a.rhs);
    if (l.is_undefined() || r.is_undefined()) return undefined_arith("arithmetic on an undefined value");
    if (!l.is_number() || !r.is_number())
      throw EvalFault("arithmetic over " + std::string(type_name(l)) + " and " + type_name(r));
    if (a.op == ArithOp::Div) {
      if (r.as_number() == 0.0) return undefined_arith("division by zero");
      return Value::real(l.as_number() / r.as_number());
    }
    if (l.is_int() && r.is_int()) {
      std::int64_t x = l.as_int(), y = r.as_int(), out = 0;
      bool overflow = false;
      switch (a.op) {
        case ArithOp::Add: overflow = __builtin_add_overflow(x, y, &out); break;
        case ArithOp::Sub: overflow = __builtin_sub_overflow(x, y, &out); break;
        case ArithOp::Mul: overflow = __builtin_mul_overflow(x, y, &out); break;
        case ArithOp::Div: break;
      }
      if (overflow) return undefined_arith("integer overflow");
      return Value::integer(out);
    }
    double x = l.as_number(), y = r.as_number();
    switch (a.op) {
      case ArithOp::Add: return Value::real(x + y);
      case ArithOp::Sub: return Value::real(x - y);
      case ArithOp::Mul: return Value::real(x * y);
      case ArithOp::Div: break;
    }
    return Value::real(x / y);
  }

  EvalContext& ctx_;
};

}  // namespace

Value evaluate(const Expr& expr, EvalContext& ctx) {
  try {
    return Evaluator(ctx).go(expr);
  } catch (const StoreError& e) {
    throw EvalFault(e.what());
  }
}

Value evaluate(const ExprPtr& expr, EvalContext& ctx) {
  if (!expr) return Value::boolean(true);
  return evaluate(*expr, ctx);
}

}  // namespace reqexec
