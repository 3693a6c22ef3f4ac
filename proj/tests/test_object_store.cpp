#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "reqexec/object_store.hpp"
#include "reqexec/parser.hpp"

using namespace reqexec;

namespace {

std::shared_ptr<const Schema> schema_of(const std::string& text) {
  ParseResult r = parse_model({{"s.rqm", text}});
  EXPECT_TRUE(r.ok());
  return std::make_shared<const Schema>(Schema::from_model(*r.model));
}

const char* kSaleSchema = R"(
class Item { Barcode: String; Price: Real; StockNumber: Integer; }
class Sale { IsComplete: Boolean; }
class SalesLineItem { Quantity: Integer; }
assoc Sale.ContainedSalesLine -> SalesLineItem many
assoc SalesLineItem.BelongedSale -> Sale one
assoc SalesLineItem.BelongedItem -> Item one
)";

const char* kHierarchy = R"(
class Base { Id: String; }
class Sub extends Base { Extra: Real; }
class Other { Flag: Boolean; }
assoc Base.Friends -> Base many
assoc Sub.Partner -> Other one
assoc Other.Owner -> Base one
)";

ObjectId make(ObjectStore& s, const std::string& cls, bool add = true) {
  ObjectId id = s.create_object(cls).as_ref();
  if (add) s.add_object(cls, id);
  return id;
}

ObjectPredicate attr_equals(const ObjectStore& s, std::string attr, Value v) {
  return [&s, attr, v](ObjectId id) { return s.get_attribute(id, attr) == v; };
}

template <typename F>
StoreErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const StoreError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected StoreError";
  return StoreErrorKind::UnknownClass;
}

}  // namespace

TEST(FindObject, SecondOfTwoItems) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId a = make(s, "Item"), b = make(s, "Item");
  s.set_attribute(a, "Barcode", Value::string("A"));
  s.set_attribute(b, "Barcode", Value::string("B"));
  EXPECT_EQ(s.find_object("Item", attr_equals(s, "Barcode", Value::string("B"))), Value::ref(b));
}

TEST(FindObject, EmptyStore) {
  ObjectStore s(schema_of(kSaleSchema));
  EXPECT_TRUE(s.find_object("Item", {}).is_undefined());
  EXPECT_TRUE(s.find_object("Item", [](ObjectId) { return true; }).is_undefined());
}

TEST(FindObject, TieBreakIsCreationOrderOverAllAddOrders) {
  // Brute force: every order of adding three matching objects returns the
  // earliest-created one.
  std::vector<int> order = {0, 1, 2};
  do {
    ObjectStore s(schema_of(kSaleSchema));
    std::vector<ObjectId> ids;
    for (int i = 0; i < 3; ++i) {
      ids.push_back(s.create_object("Item").as_ref());
      s.set_attribute(ids.back(), "Barcode", Value::string("X"));
    }
    for (int i : order) s.add_object("Item", ids[i]);
    EXPECT_EQ(s.find_object("Item", attr_equals(s, "Barcode", Value::string("X"))), Value::ref(ids[0]));
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(FindObject, UnknownClass) {
  ObjectStore s(schema_of(kSaleSchema));
  EXPECT_EQ(error_kind([&] { s.find_object("Nope", {}); }), StoreErrorKind::UnknownClass);
  EXPECT_EQ(error_kind([&] { s.find_objects("Nope"); }), StoreErrorKind::UnknownClass);
}

TEST(FindObjects, FullFilteredEmpty) {
  ObjectStore s(schema_of(kSaleSchema));
  EXPECT_TRUE(s.find_objects("Item").empty());
  std::vector<ObjectId> ids;
  for (int i = 0; i < 4; ++i) {
    ids.push_back(make(s, "Item"));
    s.set_attribute(ids.back(), "StockNumber", Value::integer(i));
  }
  EXPECT_EQ(s.find_objects("Item").ids(), ids);
  auto odd = [&](ObjectId id) { return s.get_attribute(id, "StockNumber").as_int() % 2 == 1; };
  EXPECT_EQ(s.find_objects("Item", odd).ids(), (std::vector<ObjectId>{ids[1], ids[3]}));
  EXPECT_TRUE(s.find_objects("Item", [](ObjectId) { return false; }).empty());
}

TEST(CreateObject, NotAddedUntilAddObject) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sli = s.create_object("SalesLineItem").as_ref();
  EXPECT_FALSE(s.find_objects("SalesLineItem").contains(sli));
  EXPECT_TRUE(s.exists(sli));
  EXPECT_TRUE(s.add_object("SalesLineItem", sli));
  EXPECT_TRUE(s.find_objects("SalesLineItem").contains(sli));
}

TEST(CreateObject, FreshRecordIsEmptyAndIdsIncrease) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId a = s.create_object("SalesLineItem").as_ref();
  ObjectId b = s.create_object("SalesLineItem").as_ref();
  EXPECT_LT(a, b);
  const ObjectRecord& rec = s.at(a);
  ASSERT_EQ(rec.attributes.size(), 1u);
  EXPECT_TRUE(rec.attributes.at("Quantity").is_undefined());
  ASSERT_EQ(rec.links.size(), 2u);
  EXPECT_FALSE(std::get<OneLink>(rec.links.at("BelongedSale")).target);
}

TEST(CreateObject, UnknownClass) {
  ObjectStore s(schema_of(kSaleSchema));
  EXPECT_EQ(error_kind([&] { s.create_object("NoSuchClass"); }), StoreErrorKind::UnknownClass);
}

TEST(AddObject, TwiceReturnsFalse) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId id = s.create_object("Item").as_ref();
  EXPECT_TRUE(s.add_object("Item", id));
  EXPECT_FALSE(s.add_object("Item", id));
  EXPECT_EQ(s.instance_lists().at("Item").size(), 1u);
}

TEST(AddObject, SubclassIntoSuperclassList) {
  ObjectStore s(schema_of(kHierarchy));
  ObjectId sub = s.create_object("Sub").as_ref();
  EXPECT_TRUE(s.add_object("Base", sub));
  EXPECT_TRUE(s.all_instances("Base").contains(sub));
  EXPECT_FALSE(s.all_instances("Sub").contains(sub));
  ObjectId sub2 = make(s, "Sub");
  // Added to the subclass list: visible through both.
  EXPECT_TRUE(s.all_instances("Base").contains(sub2));
  EXPECT_TRUE(s.all_instances("Sub").contains(sub2));
}

TEST(AddObject, Errors) {
  ObjectStore s(schema_of(kHierarchy));
  ObjectId base = s.create_object("Base").as_ref();
  EXPECT_EQ(error_kind([&] { s.add_object("Sub", base); }), StoreErrorKind::TypeMismatch);
  EXPECT_EQ(error_kind([&] { s.add_object("Base", ObjectId{99}); }), StoreErrorKind::DanglingRef);
  EXPECT_EQ(error_kind([&] { s.add_object("Nope", base); }), StoreErrorKind::UnknownClass);
}

TEST(ReleaseObject, ShrinksAndSecondReleaseFails) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId a = make(s, "Item");
  make(s, "Item");
  EXPECT_TRUE(s.release_object("Item", a));
  EXPECT_EQ(s.all_instances("Item").size(), 1u);
  EXPECT_FALSE(s.release_object("Item", a));
}

TEST(ReleaseObject, NotAddedIsFalse) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId a = s.create_object("Item").as_ref();
  EXPECT_FALSE(s.release_object("Item", a));
  EXPECT_TRUE(s.exists(a));
}

TEST(ReleaseObject, SeversInboundLinks) {
  // Three objects: sale -> {l1, l2}, l1 -> sale, l2 -> sale. Release l1 and
  // enumerate every slot before and after.
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sale = make(s, "Sale"), l1 = make(s, "SalesLineItem"), l2 = make(s, "SalesLineItem");
  s.add_link_one_to_many(sale, "ContainedSalesLine", l1);
  s.add_link_one_to_many(sale, "ContainedSalesLine", l2);
  s.add_link_one_to_one(l1, "BelongedSale", sale);
  s.add_link_one_to_one(l2, "BelongedSale", sale);
  ASSERT_TRUE(s.release_object("SalesLineItem", l1));
  EXPECT_FALSE(s.exists(l1));
  EXPECT_EQ(s.find_linked_objects(sale, "ContainedSalesLine").ids(), std::vector<ObjectId>{l2});
  EXPECT_EQ(s.find_linked_object(l2, "BelongedSale"), Value::ref(sale));
  // Releasing the sale empties l2's One link.
  ASSERT_TRUE(s.release_object("Sale", sale));
  EXPECT_TRUE(s.find_linked_object(l2, "BelongedSale").is_undefined());
}

TEST(Attributes, ReadAfterSetUnsetAndOverwrite) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId id = make(s, "Item");
  EXPECT_TRUE(s.get_attribute(id, "Price").is_undefined());
  EXPECT_TRUE(s.set_attribute(id, "Barcode", Value::string("B001")));
  EXPECT_EQ(s.get_attribute(id, "Barcode"), Value::string("B001"));
  s.set_attribute(id, "Barcode", Value::string("B002"));
  EXPECT_EQ(s.get_attribute(id, "Barcode"), Value::string("B002"));
}

TEST(Attributes, IntegerWidensIntoReal) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId id = make(s, "Item");
  s.set_attribute(id, "Price", Value::integer(3));
  Value v = s.get_attribute(id, "Price");
  ASSERT_TRUE(v.is_real());
  EXPECT_EQ(v.as_real(), 3.0);
}

TEST(Attributes, Errors) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId id = make(s, "Item");
  EXPECT_EQ(error_kind([&] { s.set_attribute(id, "Price", Value::string("x")); }),
            StoreErrorKind::TypeMismatch);
  EXPECT_EQ(error_kind([&] { s.set_attribute(id, "StockNumber", Value::real(1.5)); }),
            StoreErrorKind::TypeMismatch);
  EXPECT_EQ(error_kind([&] { s.get_attribute(id, "Prize"); }), StoreErrorKind::UnknownAttribute);
  EXPECT_EQ(error_kind([&] { s.get_attribute(ObjectId{42}, "Price"); }), StoreErrorKind::DanglingRef);
}

TEST(Attributes, InheritedAttributeOnSubclass) {
  ObjectStore s(schema_of(kHierarchy));
  ObjectId sub = make(s, "Sub");
  ObjectId base = make(s, "Base");
  s.set_attribute(sub, "Id", Value::string("s"));
  s.set_attribute(sub, "Extra", Value::real(1));
  EXPECT_EQ(s.get_attribute(sub, "Id"), Value::string("s"));
  EXPECT_EQ(error_kind([&] { s.get_attribute(base, "Extra"); }), StoreErrorKind::UnknownAttribute);
}

TEST(Links, NavigateAfterLinking) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sale = make(s, "Sale"), sli = make(s, "SalesLineItem");
  EXPECT_TRUE(s.find_linked_object(sli, "BelongedSale").is_undefined());
  EXPECT_TRUE(s.add_link_one_to_one(sli, "BelongedSale", sale));
  EXPECT_EQ(s.find_linked_object(sli, "BelongedSale"), Value::ref(sale));
}

TEST(Links, ManyWithConditionKeepsInsertionOrder) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sale = make(s, "Sale");
  std::vector<ObjectId> lines;
  for (int q : {5, 1, 3, 2, 4}) {
    lines.push_back(make(s, "SalesLineItem"));
    s.set_attribute(lines.back(), "Quantity", Value::integer(q));
  }
  // Link in reverse creation order; navigation follows link order.
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    s.add_link_one_to_many(sale, "ContainedSalesLine", *it);
  }
  auto big = [&](ObjectId id) { return s.get_attribute(id, "Quantity").as_int() > 2; };
  EXPECT_EQ(s.find_linked_objects(sale, "ContainedSalesLine", big).ids(),
            (std::vector<ObjectId>{lines[4], lines[2], lines[0]}));
}

TEST(Links, DuplicateManyAppendAndOneOverwrite) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId s1 = make(s, "Sale"), s2 = make(s, "Sale"), sli = make(s, "SalesLineItem");
  EXPECT_TRUE(s.add_link_one_to_many(s1, "ContainedSalesLine", sli));
  EXPECT_FALSE(s.add_link_one_to_many(s1, "ContainedSalesLine", sli));
  EXPECT_EQ(s.find_linked_objects(s1, "ContainedSalesLine").size(), 1u);
  s.add_link_one_to_one(sli, "BelongedSale", s1);
  EXPECT_TRUE(s.add_link_one_to_one(sli, "BelongedSale", s2));
  EXPECT_EQ(s.find_linked_object(sli, "BelongedSale"), Value::ref(s2));
}

TEST(Links, RemoveManyAndOne) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sale = make(s, "Sale"), sli = make(s, "SalesLineItem");
  s.add_link_one_to_many(sale, "ContainedSalesLine", sli);
  EXPECT_TRUE(s.remove_link_one_to_many(sale, "ContainedSalesLine", sli));
  EXPECT_TRUE(s.find_linked_objects(sale, "ContainedSalesLine").empty());
  EXPECT_FALSE(s.remove_link_one_to_many(sale, "ContainedSalesLine", sli));
  s.add_link_one_to_one(sli, "BelongedSale", sale);
  EXPECT_TRUE(s.remove_link_one_to_one(sli, "BelongedSale"));
  EXPECT_TRUE(s.find_linked_object(sli, "BelongedSale").is_undefined());
  EXPECT_TRUE(s.remove_link_one_to_one(sli, "BelongedSale"));
}

TEST(Links, Errors) {
  ObjectStore s(schema_of(kSaleSchema));
  ObjectId sale = make(s, "Sale"), sli = make(s, "SalesLineItem"), item = make(s, "Item");
  EXPECT_EQ(error_kind([&] { s.add_link_one_to_one(sale, "ContainedSalesLine", sli); }),
            StoreErrorKind::MultiplicityMismatch);
  EXPECT_EQ(error_kind([&] { s.add_link_one_to_many(sli, "BelongedSale", sale); }),
            StoreErrorKind::MultiplicityMismatch);
  EXPECT_EQ(error_kind([&] { s.find_linked_object(sale, "ContainedSalesLine"); }),
            StoreErrorKind::MultiplicityMismatch);
  EXPECT_EQ(error_kind([&] { s.add_link_one_to_one(sli, "Nope", sale); }), StoreErrorKind::UnknownRole);
  EXPECT_EQ(error_kind([&] { s.add_link_one_to_one(sli, "BelongedSale", item); }),
            StoreErrorKind::TypeMismatch);
  EXPECT_EQ(error_kind([&] { s.add_link_one_to_one(sli, "BelongedSale", ObjectId{77}); }),
            StoreErrorKind::DanglingRef);
}

// ---------------------------------------------------------------------------
// Shadow model: the same random operation sequence replayed on naive lists.

namespace {

struct Shadow {
  struct Obj {
    std::string cls;
    std::map<std::string, std::optional<std::uint64_t>> one;
    std::map<std::string, std::vector<std::uint64_t>> many;
  };
  std::map<std::uint64_t, Obj> objs;
  std::map<std::string, std::vector<std::uint64_t>> lists;
  std::uint64_t next = 1;
};

}  // namespace

TEST(ObjectStoreProperty, MatchesShadowModel) {
  auto schema = schema_of(kHierarchy);
  const std::vector<std::string> classes = {"Base", "Sub", "Other"};
  auto descendants = [](const std::string& c) {
    return c == "Base" ? std::vector<std::string>{"Base", "Sub"} : std::vector<std::string>{c};
  };
  auto conforms = [](const std::string& c, const std::string& target) {
    return c == target || (c == "Sub" && target == "Base");
  };
  struct Role { std::string owner, name, target; bool many; };
  const std::vector<Role> roles = {{"Base", "Friends", "Base", true},
                                   {"Sub", "Partner", "Other", false},
                                   {"Other", "Owner", "Base", false}};

  std::mt19937_64 rng(5);
  for (int run = 0; run < 60; ++run) {
    ObjectStore s(schema);
    Shadow sh;
    for (const auto& c : classes) sh.lists[c];
    auto pick_id = [&]() -> std::uint64_t {
      // Occasionally a released or never-created id.
      return std::uniform_int_distribution<std::uint64_t>(1, sh.next)(rng);
    };
    for (int step = 0; step < 150; ++step) {
      int op = std::uniform_int_distribution<int>(0, 4)(rng);
      const std::string& cls = classes[std::uniform_int_distribution<int>(0, 2)(rng)];
      std::uint64_t id = pick_id();
      bool live = sh.objs.count(id) != 0;
      auto before = s.instance_lists();
      if (op == 0) {
        ObjectId got = s.create_object(cls).as_ref();
        ASSERT_EQ(got.value, sh.next);
        Shadow::Obj o{cls, {}, {}};
        for (const auto& r : roles) {
          if (!conforms(cls, r.owner)) continue;
          if (r.many) o.many[r.name];
          else o.one[r.name];
        }
        sh.objs[sh.next++] = o;
        ASSERT_EQ(s.instance_lists(), before) << "createObject touched an instance list";
      } else if (op == 1) {
        if (!live) {
          EXPECT_THROW(s.add_object(cls, ObjectId{id}), StoreError);
        } else if (!conforms(sh.objs[id].cls, cls)) {
          EXPECT_THROW(s.add_object(cls, ObjectId{id}), StoreError);
        } else {
          auto& l = sh.lists[cls];
          bool fresh = std::find(l.begin(), l.end(), id) == l.end();
          if (fresh) l.push_back(id);
          EXPECT_EQ(s.add_object(cls, ObjectId{id}), fresh);
        }
      } else if (op == 2) {
        bool listed = false;
        for (const auto& d : descendants(cls)) {
          const auto& l = sh.lists[d];
          listed |= std::find(l.begin(), l.end(), id) != l.end();
        }
        EXPECT_EQ(s.release_object(cls, ObjectId{id}), live && listed);
        if (live && listed) {
          sh.objs.erase(id);
          for (auto& [c, l] : sh.lists) l.erase(std::remove(l.begin(), l.end(), id), l.end());
          for (auto& [oid, o] : sh.objs) {
            for (auto& [r, t] : o.one) if (t == id) t.reset();
            for (auto& [r, ts] : o.many) ts.erase(std::remove(ts.begin(), ts.end(), id), ts.end());
          }
        }
      } else {
        const Role& r = roles[std::uniform_int_distribution<int>(0, 2)(rng)];
        std::uint64_t target = pick_id();
        bool ok = live && sh.objs.count(target) && conforms(sh.objs[id].cls, r.owner) &&
                  conforms(sh.objs[target].cls, r.target);
        if (!ok) {
          if (r.many) EXPECT_THROW(s.add_link_one_to_many(ObjectId{id}, r.name, ObjectId{target}), StoreError);
          else EXPECT_THROW(s.add_link_one_to_one(ObjectId{id}, r.name, ObjectId{target}), StoreError);
        } else if (op == 3) {
          if (r.many) {
            auto& ts = sh.objs[id].many[r.name];
            bool fresh = std::find(ts.begin(), ts.end(), target) == ts.end();
            if (fresh) ts.push_back(target);
            EXPECT_EQ(s.add_link_one_to_many(ObjectId{id}, r.name, ObjectId{target}), fresh);
          } else {
            sh.objs[id].one[r.name] = target;
            EXPECT_TRUE(s.add_link_one_to_one(ObjectId{id}, r.name, ObjectId{target}));
          }
        } else {
          if (r.many) {
            auto& ts = sh.objs[id].many[r.name];
            auto it = std::find(ts.begin(), ts.end(), target);
            bool present = it != ts.end();
            if (present) ts.erase(it);
            EXPECT_EQ(s.remove_link_one_to_many(ObjectId{id}, r.name, ObjectId{target}), present);
          } else {
            sh.objs[id].one[r.name].reset();
            EXPECT_TRUE(s.remove_link_one_to_one(ObjectId{id}, r.name));
          }
        }
        if (op != 0 && op != 1 && op != 2) {
          ASSERT_EQ(s.instance_lists(), before) << "link operation touched an instance list";
        }
      }

      // allInstances against the naive lists.
      for (const auto& c : classes) {
        std::vector<std::uint64_t> want;
        for (const auto& d : descendants(c)) {
          for (auto x : sh.lists[d]) want.push_back(x);
        }
        std::sort(want.begin(), want.end());
        want.erase(std::unique(want.begin(), want.end()), want.end());
        std::vector<std::uint64_t> got;
        RefSet all = s.all_instances(c);
        for (ObjectId x : all.ids()) got.push_back(x.value);
        ASSERT_EQ(got, want) << c << " at step " << step;
      }
      // Records, links, referential integrity, no duplicate Many targets.
      ASSERT_EQ(s.records().size(), sh.objs.size());
      for (const auto& [oid, rec] : s.records()) {
        const auto& o = sh.objs.at(oid.value);
        ASSERT_EQ(rec.className, o.cls);
        for (const auto& [role, slot] : rec.links) {
          if (const auto* one = std::get_if<OneLink>(&slot)) {
            std::optional<std::uint64_t> t;
            if (one->target) t = one->target->value;
            ASSERT_EQ(t, o.one.at(role));
            if (one->target) ASSERT_TRUE(s.exists(*one->target));
          } else {
            std::vector<std::uint64_t> ts;
            for (ObjectId t : std::get<ManyLink>(slot).targets.ids()) {
              ASSERT_TRUE(s.exists(t));
              ts.push_back(t.value);
            }
            std::set<std::uint64_t> uniq(ts.begin(), ts.end());
            ASSERT_EQ(uniq.size(), ts.size());
            ASSERT_EQ(ts, o.many.at(role));
          }
        }
      }
      ASSERT_EQ(s.next_id(), sh.next);
    }
  }
}
