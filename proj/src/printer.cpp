#include "reqexec/printer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace reqexec {

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

namespace {

enum Prec { kLet = 0, kOr = 1, kAnd, kCmp, kAdd, kMul, kUnary, kPostfix };

const char* cmp_text(ast::CmpOp op) {
  switch (op) {
    case ast::CmpOp::Eq: return "=";
    case ast::CmpOp::Ne: return "<>";
    case ast::CmpOp::Lt: return "<";
    case ast::CmpOp::Le: return "<=";
    case ast::CmpOp::Gt: return ">";
    case ast::CmpOp::Ge: return ">=";
  }
  return "?";
}

const char* arith_text(ast::ArithOp op) {
  switch (op) {
    case ast::ArithOp::Add: return "+";
    case ast::ArithOp::Sub: return "-";
    case ast::ArithOp::Mul: return "*";
    case ast::ArithOp::Div: return "/";
  }
  return "?";
}

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Shortest form that still reads back exactly.
  for (int digits = 1; digits < 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

int precedence(const Expr& e) {
  if (e.is<ast::LetIn>()) return kLet;
  if (e.is<ast::Or>()) return kOr;
  if (e.is<ast::And>()) return kAnd;
  if (e.is<ast::Compare>()) return kCmp;
  if (const auto* a = e.as<ast::Arith>()) {
    return a->op == ast::ArithOp::Add || a->op == ast::ArithOp::Sub ? kAdd : kMul;
  }
  if (e.is<ast::Not>()) return kUnary;
  if (const auto* i = e.as<ast::IntLit>(); i && i->value < 0) return kUnary;
  if (const auto* r = e.as<ast::RealLit>(); r && std::signbit(r->value)) return kUnary;
  return kPostfix;
}

class Printer {
 public:
  std::string out;

  // `min` is the loosest precedence allowed without parentheses; `tail` is
  // true when nothing follows this operand in the enclosing text, which is the
  // only place a `let` can appear bare.
  void print(const Expr& e, int min, bool tail) {
    int p = precedence(e);
    bool parens = p < min || (p == kLet && !tail);
    if (parens) out += '(';
    emit(e, parens || tail);
    if (parens) out += ')';
  }

 private:
  void print_args(const std::vector<ExprPtr>& args) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      print(*args[i], kLet, true);
    }
    out += ')';
  }

  void iterator(const std::string& var, const std::string& cls, const Expr& body) {
    out += '(';
    out += var;
    if (!cls.empty()) out += ":" + cls;
    out += " | ";
    print(body, kLet, true);
    out += ')';
  }

  void emit(const Expr& e, bool tail) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          using namespace ast;
          if constexpr (std::is_same_v<T, IntLit>) out += std::to_string(n.value);
          else if constexpr (std::is_same_v<T, RealLit>) out += real_text(n.value);
          else if constexpr (std::is_same_v<T, StrLit>) out += quote_string(n.value);
          else if constexpr (std::is_same_v<T, BoolLit>) out += n.value ? "true" : "false";
          else if constexpr (std::is_same_v<T, NullLit>) out += "null";
          else if constexpr (std::is_same_v<T, VarRef>) out += n.name;
          else if constexpr (std::is_same_v<T, SelfRef>) out += "self";
          else if constexpr (std::is_same_v<T, ResultRef>) out += "result";
          else if constexpr (std::is_same_v<T, ParamRef>) out += n.name;
          else if constexpr (std::is_same_v<T, AttrNav>) {
            print(*n.object, kPostfix, false);
            out += "." + n.attr;
          } else if constexpr (std::is_same_v<T, AssocNav>) {
            print(*n.object, kPostfix, false);
            out += "." + n.role;
          } else if constexpr (std::is_same_v<T, AtPre>) {
            print(*n.expr, kPostfix, false);
            out += "@pre";
          } else if constexpr (std::is_same_v<T, AllInstances>) {
            out += n.className + ".allInstances()";
          } else if constexpr (std::is_same_v<T, Any> || std::is_same_v<T, Select>) {
            print(*n.collection, kPostfix, false);
            out += std::is_same_v<T, Any> ? "->any" : "->select";
            iterator(n.boundVar, n.boundClass, *n.cond);
          } else if constexpr (std::is_same_v<T, ForAll>) {
            print(*n.collection, kPostfix, false);
            out += "->forAll";
            iterator(n.boundVar, n.boundClass, *n.body);
          } else if constexpr (std::is_same_v<T, Includes> || std::is_same_v<T, Excludes>) {
            print(*n.collection, kPostfix, false);
            out += std::is_same_v<T, Includes> ? "->includes(" : "->excludes(";
            print(*n.element, kLet, true);
            out += ')';
          } else if constexpr (std::is_same_v<T, Size>) {
            print(*n.collection, kPostfix, false);
            out += "->size()";
          } else if constexpr (std::is_same_v<T, IsEmpty>) {
            print(*n.collection, kPostfix, false);
            out += "->isEmpty()";
          } else if constexpr (std::is_same_v<T, IsUnique>) {
            out += n.className + ".allInstances()->isUnique(" + n.boundVar + ":" + n.className +
                   " | " + n.boundVar + "." + n.attr + ")";
          } else if constexpr (std::is_same_v<T, OclIsNew>) {
            print(*n.expr, kPostfix, false);
            out += ".oclIsNew()";
          } else if constexpr (std::is_same_v<T, OclIsUndefined>) {
            print(*n.expr, kPostfix, false);
            out += ".oclIsUndefined()";
          } else if constexpr (std::is_same_v<T, OclIsTypeOf>) {
            print(*n.expr, kPostfix, false);
            out += ".oclIsTypeOf(" + n.typeName + ")";
          } else if constexpr (std::is_same_v<T, LetIn>) {
            out += "let " + n.name + ":" + n.className + " in ";
            print(*n.body, kLet, true);
          } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
            int p = std::is_same_v<T, And> ? kAnd : kOr;
            print(*n.lhs, p, false);
            out += std::is_same_v<T, And> ? " and " : " or ";
            print(*n.rhs, p + 1, tail);
          } else if constexpr (std::is_same_v<T, Compare>) {
            print(*n.lhs, kCmp + 1, false);
            out += std::string(" ") + cmp_text(n.op) + " ";
            print(*n.rhs, kCmp + 1, tail);
          } else if constexpr (std::is_same_v<T, Arith>) {
            int p = precedence(e);
            print(*n.lhs, p, false);
            out += std::string(" ") + arith_text(n.op) + " ";
            print(*n.rhs, p + 1, tail);
          } else if constexpr (std::is_same_v<T, Not>) {
            out += "not ";
            print(*n.expr, kUnary, tail);
          } else if constexpr (std::is_same_v<T, ExternalCall>) {
            out += n.service + "::" + n.op;
            print_args(n.args);
          } else if constexpr (std::is_same_v<T, OpCall>) {
            print(*n.target, kPostfix, false);
            out += (n.arrow ? "->" : ".") + n.op;
            if (!n.boundVar.empty()) iterator(n.boundVar, n.boundClass, *n.args.front());
            else print_args(n.args);
          } else {
            static_assert(sizeof(T) == 0, "unhandled node");
          }
        },
        e.node);
  }
};

}  // namespace

std::string print_expr(const Expr& expr) {
  Printer p;
  p.print(expr, kLet, true);
  return p.out;
}

std::string print_expr(const ExprPtr& expr) { return expr ? print_expr(*expr) : std::string(); }

std::string print_model(const RequirementsModel& m) {
  std::ostringstream os;
  for (const auto& a : m.actors) os << "actor " << a << "\n";
  if (!m.actors.empty()) os << "\n";
  for (const auto& c : m.classes) {
    os << "class " << c.name;
    if (c.superClass) os << " extends " << *c.superClass;
    if (c.crudMarked) os << " crud";
    os << " {\n";
    for (const auto& a : c.attributes) os << "  " << a.name << ": " << to_string(a.type) << ";\n";
    os << "}\n\n";
  }
  for (const auto& a : m.associations) {
    os << "assoc " << a.owner << "." << a.roleName << " -> " << a.target << " "
       << (a.multiplicity == Multiplicity::One ? "one" : "many") << "\n";
  }
  if (!m.associations.empty()) os << "\n";
  for (const auto& u : m.useCases) {
    os << "usecase " << u.name << " actor " << u.primaryActor << " {\n";
    for (const auto& op : u.operations) os << "  " << op << ";\n";
    os << "}\n\n";
  }
  for (const auto& inv : m.invariants) {
    os << "inv " << inv.name;
    if (inv.contextClass) os << " on " << *inv.contextClass;
    os << ": " << print_expr(inv.expr) << "\n";
  }
  if (!m.invariants.empty()) os << "\n";
  for (const auto& c : m.contracts) {
    os << "contract " << c.useCase << "::" << c.signature.name << "(";
    for (std::size_t i = 0; i < c.signature.params.size(); ++i) {
      if (i) os << ", ";
      os << c.signature.params[i].name << " : " << to_string(c.signature.params[i].type);
    }
    os << ")";
    if (c.signature.returnType) os << " : " << to_string(*c.signature.returnType);
    os << " {\n";
    if (!c.definitions.empty()) {
      os << "  definition:\n";
      for (const auto& d : c.definitions)
        os << "    " << d.name << ":" << to_string(d.declaredType) << " = " << print_expr(d.expr)
           << ";\n";
    }
    os << "  precondition:\n    " << print_expr(c.precondition) << "\n";
    os << "  postcondition:\n    " << print_expr(c.postcondition) << "\n}\n\n";
  }
  return os.str();
}

}  // namespace reqexec
