#include <gtest/gtest.h>

#include <random>

#include "reqexec/fixtures.hpp"
#include "reqexec/parser.hpp"
#include "reqexec/printer.hpp"
#include "support.hpp"

using namespace reqexec;
using namespace reqexec::testing;

namespace {

ExprPtr parse_ok(std::string_view text) {
  ExprParseResult r = parse_ocl_expr(text);
  EXPECT_TRUE(r.expr) << text << ": " << (r.diagnostic ? r.diagnostic->message : "");
  return r.expr;
}

ParseResult parse_text(const std::string& text) { return parse_model({{"m.rqm", text}}); }

const char* kEnterItemContract = R"(
Contract CoCoMEProcessSale::enterItem
  (barcode : String, quantity : Real) : Boolean {

//Definition Section
definition:
    //Find Object
    item:Item = Item.allInstance()->any(i:Item | i.Barcode = barcode)

//Pre-condition Section
precondition:
    currentSale.oclIsUndefined() = false and
    currentSale.IsComplete = false and
    item.oclIsUndefined() = false and
    item.StockNumber > 0

//Post-condition Section
postcondition:
    //Create an Object
    let sli:SalesLineItem in
    sli.oclIsNew() and
    //Add Links
    self.currentSaleLine = sli and
    sli.BelongedSale = currentSale and
    currentSale.ContainedSalesLine->includes(sli) and
    sli.BelongedItem = item and
    //Modify Attributes
    sli.Quantity = quantity and
    sli.Subamount = item.Price * quantity and
    item.StockNumber = item.StockNumber@pre - quantity and
    //Add an Object
    SalesLineItem.allInstance()->includes(sli) and
    result = true
}
)";

}  // namespace

TEST(ParseOclExpr, AtPreSubtraction) {
  ExprPtr e = parse_ok("item.StockNumber = item.StockNumber@pre - quantity");
  const auto* cmp = e->as<ast::Compare>();
  ASSERT_TRUE(cmp);
  EXPECT_EQ(cmp->op, ast::CmpOp::Eq);
  const auto* lhs = cmp->lhs->as<ast::AttrNav>();
  ASSERT_TRUE(lhs);
  EXPECT_EQ(lhs->attr, "StockNumber");
  const auto* rhs = cmp->rhs->as<ast::Arith>();
  ASSERT_TRUE(rhs);
  EXPECT_EQ(rhs->op, ast::ArithOp::Sub);
  const auto* pre = rhs->lhs->as<ast::AtPre>();
  ASSERT_TRUE(pre);
  EXPECT_TRUE(pre->expr->is<ast::AttrNav>());
  // A parameter is a plain name until resolution classifies it.
  const auto* q = rhs->rhs->as<ast::VarRef>();
  ASSERT_TRUE(q);
  EXPECT_EQ(q->name, "quantity");
}

TEST(ParseOclExpr, AndBindsTighterThanOr) {
  ExprPtr e = parse_ok("a and b or c");
  const auto* o = e->as<ast::Or>();
  ASSERT_TRUE(o);
  EXPECT_TRUE(o->lhs->is<ast::And>());
  EXPECT_TRUE(o->rhs->is<ast::VarRef>());
}

TEST(ParseOclExpr, IncludesOverAllInstances) {
  ExprPtr e = parse_ok("SalesLineItem.allInstances()->includes(sli)");
  const auto* inc = e->as<ast::Includes>();
  ASSERT_TRUE(inc);
  const auto* all = inc->collection->as<ast::AllInstances>();
  ASSERT_TRUE(all);
  EXPECT_EQ(all->className, "SalesLineItem");
  EXPECT_TRUE(inc->element->is<ast::VarRef>());
}

TEST(ParseOclExpr, BothAllInstanceSpellingsNormalize) {
  ExprPtr a = parse_ok("Item.allInstance()->any(i:Item | i.Barcode = barcode)");
  ExprPtr b = parse_ok("Item.allInstances()->any(i:Item | i.Barcode = barcode)");
  EXPECT_TRUE(same_structure(a, b));
  EXPECT_EQ(print_expr(a), "Item.allInstances()->any(i:Item | i.Barcode = barcode)");
}

TEST(ParseOclExpr, Precedence) {
  // * binds tighter than +, + tighter than comparison, comparison tighter than and.
  ExprPtr e = parse_ok("x + y * 2 > 3 and not z");
  const auto* a = e->as<ast::And>();
  ASSERT_TRUE(a);
  const auto* cmp = a->lhs->as<ast::Compare>();
  ASSERT_TRUE(cmp);
  const auto* add = cmp->lhs->as<ast::Arith>();
  ASSERT_TRUE(add);
  EXPECT_EQ(add->op, ast::ArithOp::Add);
  ASSERT_TRUE(add->rhs->is<ast::Arith>());
  EXPECT_EQ(add->rhs->as<ast::Arith>()->op, ast::ArithOp::Mul);
  EXPECT_TRUE(a->rhs->is<ast::Not>());
}

TEST(ParseOclExpr, ArrowBindsToWholeNavigationChain) {
  ExprPtr e = parse_ok("currentSale.ContainedSalesLine->size()");
  const auto* s = e->as<ast::Size>();
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->collection->is<ast::AttrNav>());
}

TEST(ParseOclExpr, ArithmeticIsLeftAssociative) {
  ExprPtr e = parse_ok("a - b - c");
  const auto* outer = e->as<ast::Arith>();
  ASSERT_TRUE(outer);
  EXPECT_TRUE(outer->lhs->is<ast::Arith>());
  EXPECT_TRUE(outer->rhs->is<ast::VarRef>());
}

TEST(ParseOclExpr, ExternalCallAndOpCall) {
  ExprPtr e = parse_ok("Sorting::descending(Item.allInstances())");
  const auto* call = e->as<ast::ExternalCall>();
  ASSERT_TRUE(call);
  EXPECT_EQ(call->service, "Sorting");
  EXPECT_EQ(call->op, "descending");
  ASSERT_EQ(call->args.size(), 1u);

  ExprPtr f = parse_ok("items->first(10)");
  const auto* op = f->as<ast::OpCall>();
  ASSERT_TRUE(op);
  EXPECT_EQ(op->op, "first");
  EXPECT_TRUE(op->arrow);
}

TEST(ParseOclExpr, StringEscapes) {
  ExprPtr e = parse_ok(R"("a\"b\\c\nd")");
  const auto* s = e->as<ast::StrLit>();
  ASSERT_TRUE(s);
  EXPECT_EQ(s->value, "a\"b\\c\nd");
}

TEST(ParseOclExpr, ErrorsAreLocatedAndReturnNoTree) {
  for (std::string_view bad : {"a and", "x.", "(a", "a = = b", "1 +", "\"open", "a b"}) {
    ExprParseResult r = parse_ocl_expr(bad);
    EXPECT_FALSE(r.expr) << bad;
    ASSERT_TRUE(r.diagnostic) << bad;
    EXPECT_EQ(r.diagnostic->location.line, 1) << bad;
    EXPECT_GE(r.diagnostic->location.col, 1) << bad;
    EXPECT_LE(r.diagnostic->location.col, static_cast<int>(bad.size()) + 1) << bad;
  }
}

TEST(ParseModel, EnterItemListingSections) {
  ParseResult r = parse_text(kEnterItemContract);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.model->contracts.size(), 1u);
  const Contract& c = r.model->contracts[0];
  EXPECT_EQ(c.useCase, "CoCoMEProcessSale");
  EXPECT_EQ(c.signature.name, "enterItem");
  ASSERT_EQ(c.signature.params.size(), 2u);
  EXPECT_EQ(c.signature.params[0], (Parameter{"barcode", PrimType::String}));
  EXPECT_EQ(c.signature.params[1], (Parameter{"quantity", PrimType::Real}));
  ASSERT_TRUE(c.signature.returnType);
  EXPECT_EQ(*c.signature.returnType, TypeRef::of(PrimType::Boolean));
  EXPECT_EQ(c.definitions.size(), 1u);
  EXPECT_EQ(split_conjuncts(c.precondition).size(), 4u);
  EXPECT_EQ(split_conjuncts(c.postcondition).size(), 10u);
}

TEST(ParseModel, EmptyInput) {
  ParseResult r = parse_text("");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_TRUE(r.model->classes.empty());
  EXPECT_TRUE(r.model->contracts.empty());
}

TEST(ParseModel, CommentsOnly) {
  ParseResult r = parse_text("// line\n/* block\n spanning */\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ParseModel, MissingPostconditionKeyword) {
  ParseResult r = parse_text(
      "contract U::op() {\nprecondition:\n  true\n  result = true\n}\n");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, ParseDiagnostic::Severity::Error);
  EXPECT_NE(r.diagnostics[0].message.find("postcondition"), std::string::npos);
  EXPECT_EQ(r.diagnostics[0].location.line, 4);
}

TEST(ParseModel, RecoversAtNextDeclaration) {
  ParseResult r = parse_text(
      "class A { X Integer; }\n"
      "actor Fine\n"
      "assoc A.r -> B sideways\n"
      "class B { Y: Integer; }\n");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[0].location.line, 1);
  EXPECT_EQ(r.diagnostics[1].location.line, 3);
  EXPECT_EQ(r.diagnostics[0].file, "m.rqm");
}

TEST(ParseModel, TopLevelDeclarations) {
  ParseResult r = parse_text(
      "actor Clerk\n"
      "class Base { Id: String; }\n"
      "class Store extends Base crud { Size: Real; Open: Boolean; N: Integer; }\n"
      "assoc Store.Items -> Base many\n"
      "assoc Base.Home -> Store one\n"
      "usecase Run actor Clerk { a; b }\n"
      "inv Positive on Store: self.Size >= 0\n"
      "inv Global: Store.allInstances()->size() < 10\n");
  ASSERT_TRUE(r.ok());
  const RequirementsModel& m = *r.model;
  EXPECT_EQ(m.actors, std::vector<std::string>{"Clerk"});
  ASSERT_EQ(m.classes.size(), 2u);
  EXPECT_EQ(m.classes[1].superClass, std::optional<std::string>("Base"));
  EXPECT_TRUE(m.classes[1].crudMarked);
  EXPECT_FALSE(m.classes[0].crudMarked);
  EXPECT_EQ(m.classes[1].attributes.size(), 3u);
  ASSERT_EQ(m.associations.size(), 2u);
  EXPECT_EQ(m.associations[0].multiplicity, Multiplicity::Many);
  EXPECT_EQ(m.associations[1].multiplicity, Multiplicity::One);
  ASSERT_EQ(m.useCases.size(), 1u);
  EXPECT_EQ(m.useCases[0].operations, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(m.invariants.size(), 2u);
  EXPECT_EQ(m.invariants[0].contextClass, std::optional<std::string>("Store"));
  EXPECT_FALSE(m.invariants[1].contextClass);
}

TEST(ParseModel, MergesFiles) {
  ParseResult r = parse_model({{"a.rqm", "actor A\nclass X { V: Integer; }\n"},
                               {"b.rqm", "actor B\nusecase U actor B { op; }\n"}});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->actors, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(r.model->classes.size(), 1u);
  EXPECT_EQ(r.model->useCases.size(), 1u);
}

TEST(ParseModel, DiagnosticNamesItsFile) {
  ParseResult r = parse_model({{"good.rqm", "actor A\n"}, {"bad.rqm", "actor\n"}});
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].file, "bad.rqm");
}

TEST(ParseModel, UnreadableFile) {
  ParseResult r = parse_model_files({"/nonexistent/model.rqm"});
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].file, "/nonexistent/model.rqm");
}

TEST(ParseModel, FixturesRoundTripThroughPrinter) {
  for (const auto& name : fixture_names()) {
    RequirementsModel m = load_fixture(name);
    std::string printed = print_model(m);
    ParseResult again = parse_text(printed);
    ASSERT_TRUE(again.ok()) << name << "\n" << printed;
    EXPECT_TRUE(same_structure(m, *again.model)) << name;
    // Printing is a fixed point after one round.
    EXPECT_EQ(print_model(*again.model), printed) << name;
  }
}

// ---------------------------------------------------------------------------
// Random well-formed expressions: print, reparse, compare trees.

namespace {

class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

  ExprPtr any(int depth) {
    if (depth <= 0 || coin(0.25)) return leaf();
    switch (roll(16)) {
      case 0: return make_expr(ast::AttrNav{nav_base(depth - 1), word(kAttrs)});
      case 1: return make_expr(ast::AtPre{make_expr(ast::AttrNav{nav_base(depth - 1), word(kAttrs)})});
      case 2: return make_expr(ast::Any{collection(depth - 1), "v", typed(), any(depth - 1)});
      case 3: return make_expr(ast::Select{collection(depth - 1), "w", typed(), any(depth - 1)});
      case 4: return make_expr(ast::ForAll{collection(depth - 1), "u", typed(), any(depth - 1)});
      case 5: return make_expr(ast::Includes{collection(depth - 1), any(depth - 1)});
      case 6: return make_expr(ast::Excludes{collection(depth - 1), any(depth - 1)});
      case 7: return coin(0.5) ? make_expr(ast::Size{collection(depth - 1)})
                               : make_expr(ast::IsEmpty{collection(depth - 1)});
      case 8: return coin(0.5) ? make_expr(ast::OclIsNew{nav_base(depth - 1)})
                               : make_expr(ast::OclIsUndefined{nav_base(depth - 1)});
      case 9: return make_expr(ast::And{any(depth - 1), any(depth - 1)});
      case 10: return make_expr(ast::Or{any(depth - 1), any(depth - 1)});
      case 11: return make_expr(ast::Not{any(depth - 1)});
      case 12:
        return make_expr(ast::Compare{static_cast<ast::CmpOp>(roll(6)), any(depth - 1), any(depth - 1)});
      case 13:
        return make_expr(ast::Arith{static_cast<ast::ArithOp>(roll(4)), any(depth - 1), any(depth - 1)});
      case 14: {
        std::vector<ExprPtr> args;
        for (int i = roll(3); i > 0; --i) args.push_back(any(depth - 1));
        return make_expr(ast::ExternalCall{"Svc", word(kOps), std::move(args)});
      }
      default:
        return make_expr(ast::LetIn{"tmp", "Item", any(depth - 1)});
    }
  }

 private:
  static inline const std::vector<std::string> kVars = {"a", "item", "currentSale", "x1"};
  static inline const std::vector<std::string> kAttrs = {"Price", "Barcode", "Links"};
  static inline const std::vector<std::string> kOps = {"send", "score"};
  static inline const std::vector<std::string> kClasses = {"Item", "Sale"};

  int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::string word(const std::vector<std::string>& v) { return v[roll(static_cast<int>(v.size()))]; }
  std::string typed() { return coin(0.5) ? word(kClasses) : std::string(); }

  ExprPtr leaf() {
    switch (roll(9)) {
      case 0: return make_expr(ast::IntLit{roll(1000)});
      case 1: {
        static const double reals[] = {0.5, 2.25, 1e-9, 1234.5, 0.1, 3.0};
        return make_expr(ast::RealLit{reals[roll(6)]});
      }
      case 2: {
        static const char* strs[] = {"", "B001", "quote\"d", "back\\slash", "new\nline"};
        return make_expr(ast::StrLit{strs[roll(5)]});
      }
      case 3: return make_expr(ast::BoolLit{coin(0.5)});
      case 4: return make_expr(ast::NullLit{});
      case 5: return make_expr(ast::SelfRef{});
      case 6: return make_expr(ast::ResultRef{});
      default: return make_expr(ast::VarRef{word(kVars)});
    }
  }

  ExprPtr nav_base(int depth) {
    if (depth <= 0 || coin(0.5)) return make_expr(ast::VarRef{word(kVars)});
    return make_expr(ast::AttrNav{nav_base(depth - 1), word(kAttrs)});
  }

  ExprPtr collection(int depth) {
    if (coin(0.5)) return make_expr(ast::AllInstances{word(kClasses)});
    return make_expr(ast::AttrNav{nav_base(depth), "Links"});
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST(ParseOclExprProperty, PrintedRandomExpressionsReparseToTheSameTree) {
  ExprGen gen(7);
  for (int i = 0; i < 3000; ++i) {
    ExprPtr e = gen.any(5);
    std::string text = print_expr(e);
    ExprParseResult r = parse_ocl_expr(text);
    ASSERT_TRUE(r.expr) << text << "\n" << (r.diagnostic ? r.diagnostic->message : "");
    ASSERT_TRUE(same_structure(e, r.expr)) << text << "\nreprinted: " << print_expr(r.expr);
  }
}

TEST(ParseOclExprProperty, RedundantParenthesesDoNotChangeTheTree) {
  ExprGen gen(11);
  for (int i = 0; i < 500; ++i) {
    ExprPtr e = gen.any(4);
    std::string text = print_expr(e);
    ExprParseResult r = parse_ocl_expr("(" + text + ")");
    ASSERT_TRUE(r.expr) << text;
    EXPECT_TRUE(same_structure(e, r.expr)) << text;
  }
}
