#include "reqexec/object_store.hpp"

#include <algorithm>

namespace reqexec {

// ---------------------------------------------------------------------------
// Schema

Schema Schema::from_model(const RequirementsModel& model) {
  Schema s;
  for (const auto& c : model.classes) {
    s.order_.push_back(c.name);
    s.classes_[c.name] = ClassInfo{c.name, c.superClass, {}, {}};
  }
  // Resolve inheritance root-first so ancestors' slots precede the class's own.
  std::function<void(const ConceptualClass&)> fill = [&](const ConceptualClass& c) {
    ClassInfo& info = s.classes_.at(c.name);
    if (!info.attributes.empty() || !info.roles.empty()) return;
    if (c.superClass) {
      if (const auto* parent = model.find_class(*c.superClass)) {
        fill(*parent);
        const ClassInfo& p = s.classes_.at(parent->name);
        info.attributes = p.attributes;
        info.roles = p.roles;
      }
    }
    info.attributes.insert(info.attributes.end(), c.attributes.begin(), c.attributes.end());
    for (const auto& a : model.associations) {
      if (a.owner == c.name) info.roles.push_back(a);
    }
  };
  for (const auto& c : model.classes) fill(c);
  return s;
}

const ClassInfo* Schema::find(std::string_view cls) const {
  auto it = classes_.find(cls);
  return it == classes_.end() ? nullptr : &it->second;
}

const ClassInfo& Schema::at(std::string_view cls) const {
  const ClassInfo* c = find(cls);
  if (!c) throw StoreError(StoreErrorKind::UnknownClass, "unknown class '" + std::string(cls) + "'");
  return *c;
}

bool Schema::conforms_to(std::string_view cls, std::string_view ancestor) const {
  const ClassInfo* c = find(cls);
  for (int depth = 0; c && depth <= static_cast<int>(classes_.size()); ++depth) {
    if (c->name == ancestor) return true;
    if (!c->superClass) return false;
    c = find(*c->superClass);
  }
  return false;
}

std::vector<std::string> Schema::with_descendants(std::string_view cls) const {
  std::vector<std::string> out;
  for (const auto& name : order_) {
    if (conforms_to(name, cls)) out.push_back(name);
  }
  return out;
}

const Attribute* Schema::attribute(std::string_view cls, std::string_view name) const {
  const ClassInfo* c = find(cls);
  if (!c) return nullptr;
  for (const auto& a : c->attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const AssociationEnd* Schema::role(std::string_view cls, std::string_view name) const {
  const ClassInfo* c = find(cls);
  if (!c) return nullptr;
  for (const auto& r : c->roles) {
    if (r.roleName == name) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// ObjectStore

const char* to_string(StoreErrorKind k) {
  switch (k) {
    case StoreErrorKind::UnknownClass: return "UnknownClass";
    case StoreErrorKind::DanglingRef: return "DanglingRef";
    case StoreErrorKind::UnknownAttribute: return "UnknownAttribute";
    case StoreErrorKind::UnknownRole: return "UnknownRole";
    case StoreErrorKind::TypeMismatch: return "TypeMismatch";
    case StoreErrorKind::MultiplicityMismatch: return "MultiplicityMismatch";
  }
  return "?";
}

ObjectStore::ObjectStore(std::shared_ptr<const Schema> schema) : schema_(std::move(schema)) {
  for (const auto& name : schema_->class_names()) instances_[name];
}

const ClassInfo& ObjectStore::known_class(std::string_view cls) const { return schema_->at(cls); }

ObjectRecord& ObjectStore::live(ObjectId id) {
  auto it = records_.find(id);
  if (it == records_.end())
    throw StoreError(StoreErrorKind::DanglingRef, "no live object " + to_string(id));
  return it->second;
}

const ObjectRecord& ObjectStore::live(ObjectId id) const {
  auto it = records_.find(id);
  if (it == records_.end())
    throw StoreError(StoreErrorKind::DanglingRef, "no live object " + to_string(id));
  return it->second;
}

const AssociationEnd& ObjectStore::known_role(const ObjectRecord& rec, std::string_view role) const {
  const AssociationEnd* r = schema_->role(rec.className, role);
  if (!r) {
    throw StoreError(StoreErrorKind::UnknownRole,
                     "class '" + rec.className + "' has no role '" + std::string(role) + "'");
  }
  return *r;
}

const ObjectRecord* ObjectStore::record(ObjectId id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const ObjectRecord& ObjectStore::at(ObjectId id) const { return live(id); }

RefSet ObjectStore::all_instances(std::string_view cls) const {
  known_class(cls);
  std::vector<ObjectId> ids;
  for (const auto& name : schema_->with_descendants(cls)) {
    const auto& list = instances_.at(name);
    ids.insert(ids.end(), list.begin(), list.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return RefSet(std::move(ids));
}

Value ObjectStore::find_object(std::string_view cls, const ObjectPredicate& cond) const {
  RefSet all = all_instances(cls);
  for (ObjectId id : all.ids()) {
    if (!cond || cond(id)) return Value::ref(id);
  }
  return Value::undefined();
}

RefSet ObjectStore::find_objects(std::string_view cls, const ObjectPredicate& cond) const {
  RefSet all = all_instances(cls);
  if (!cond) return all;
  RefSet out;
  for (ObjectId id : all.ids()) {
    if (cond(id)) out.insert(id);
  }
  return out;
}

ObjectRecord ObjectStore::blank_record(std::string_view cls) const {
  const ClassInfo& info = known_class(cls);
  ObjectRecord rec;
  rec.className = info.name;
  for (const auto& a : info.attributes) rec.attributes[a.name] = Value::undefined();
  for (const auto& r : info.roles) {
    if (r.multiplicity == Multiplicity::One) rec.links[r.roleName] = OneLink{};
    else rec.links[r.roleName] = ManyLink{};
  }
  return rec;
}

Value ObjectStore::create_object(std::string_view cls) {
  ObjectRecord rec = blank_record(cls);
  rec.id = ObjectId{nextId_++};
  ObjectId id = rec.id;
  records_.emplace(id, std::move(rec));
  return Value::ref(id);
}

bool ObjectStore::add_object(std::string_view cls, ObjectId ref) {
  const ClassInfo& info = known_class(cls);
  const ObjectRecord& rec = live(ref);
  if (!schema_->conforms_to(rec.className, info.name)) {
    throw StoreError(StoreErrorKind::TypeMismatch,
                     to_string(ref) + " of class '" + rec.className + "' is not a " + info.name);
  }
  auto& list = instances_.at(info.name);
  if (std::find(list.begin(), list.end(), ref) != list.end()) return false;
  list.push_back(ref);
  return true;
}

bool ObjectStore::release_object(std::string_view cls, ObjectId ref) {
  known_class(cls);
  if (!exists(ref) || !all_instances(cls).contains(ref)) return false;
  for (auto& [name, list] : instances_) {
    list.erase(std::remove(list.begin(), list.end(), ref), list.end());
  }
  records_.erase(ref);
  for (auto& [id, rec] : records_) {
    for (auto& [role, slot] : rec.links) {
      if (auto* one = std::get_if<OneLink>(&slot)) {
        if (one->target == ref) one->target.reset();
      } else {
        std::get<ManyLink>(slot).targets.erase(ref);
      }
    }
  }
  return true;
}

Value ObjectStore::get_attribute(ObjectId ref, std::string_view attr) const {
  const ObjectRecord& rec = live(ref);
  auto it = rec.attributes.find(std::string(attr));
  if (it == rec.attributes.end()) {
    throw StoreError(StoreErrorKind::UnknownAttribute,
                     "class '" + rec.className + "' has no attribute '" + std::string(attr) + "'");
  }
  return it->second;
}

bool ObjectStore::set_attribute(ObjectId ref, std::string_view attr, const Value& value) {
  ObjectRecord& rec = live(ref);
  const Attribute* decl = schema_->attribute(rec.className, attr);
  if (!decl) {
    throw StoreError(StoreErrorKind::UnknownAttribute,
                     "class '" + rec.className + "' has no attribute '" + std::string(attr) + "'");
  }
  if (!conforms(value, decl->type)) {
    throw StoreError(StoreErrorKind::TypeMismatch,
                     "cannot store " + std::string(type_name(value)) + " in " + rec.className + "." +
                         decl->name + " : " + to_string(decl->type));
  }
  rec.attributes[decl->name] = coerce(value, decl->type);
  return true;
}

Value ObjectStore::find_linked_object(ObjectId ref, std::string_view role,
                                      const ObjectPredicate& cond) const {
  const ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  const LinkSlot& slot = rec.links.at(end.roleName);
  if (const auto* one = std::get_if<OneLink>(&slot)) {
    if (one->target && (!cond || cond(*one->target))) return Value::ref(*one->target);
    return Value::undefined();
  }
  if (!cond) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is many-valued; use findLinkedObjects");
  }
  for (ObjectId id : std::get<ManyLink>(slot).targets.ids()) {
    if (cond(id)) return Value::ref(id);
  }
  return Value::undefined();
}

RefSet ObjectStore::find_linked_objects(ObjectId ref, std::string_view role,
                                        const ObjectPredicate& cond) const {
  const ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  const auto* many = std::get_if<ManyLink>(&rec.links.at(end.roleName));
  if (!many) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is single-valued; use findLinkedObject");
  }
  if (!cond) return many->targets;
  RefSet out;
  for (ObjectId id : many->targets.ids()) {
    if (cond(id)) out.insert(id);
  }
  return out;
}

namespace {

void check_target(const Schema& schema, const AssociationEnd& end, const ObjectRecord& target) {
  if (!schema.conforms_to(target.className, end.target)) {
    throw StoreError(StoreErrorKind::TypeMismatch,
                     "role '" + end.roleName + "' expects " + end.target + ", got " +
                         target.className);
  }
}

}  // namespace

bool ObjectStore::add_link_one_to_many(ObjectId ref, std::string_view role, ObjectId target) {
  ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  auto* many = std::get_if<ManyLink>(&rec.links.at(end.roleName));
  if (!many) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is single-valued");
  }
  check_target(*schema_, end, live(target));
  return many->targets.insert(target);
}

bool ObjectStore::add_link_one_to_one(ObjectId ref, std::string_view role, ObjectId target) {
  ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  auto* one = std::get_if<OneLink>(&rec.links.at(end.roleName));
  if (!one) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is many-valued");
  }
  check_target(*schema_, end, live(target));
  one->target = target;
  return true;
}

bool ObjectStore::remove_link_one_to_many(ObjectId ref, std::string_view role, ObjectId target) {
  ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  auto* many = std::get_if<ManyLink>(&rec.links.at(end.roleName));
  if (!many) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is single-valued");
  }
  return many->targets.erase(target);
}

bool ObjectStore::remove_link_one_to_one(ObjectId ref, std::string_view role) {
  ObjectRecord& rec = live(ref);
  const AssociationEnd& end = known_role(rec, role);
  auto* one = std::get_if<OneLink>(&rec.links.at(end.roleName));
  if (!one) {
    throw StoreError(StoreErrorKind::MultiplicityMismatch,
                     "role '" + end.roleName + "' is many-valued");
  }
  one->target.reset();
  return true;
}

void ObjectStore::restore(std::map<ObjectId, ObjectRecord> records,
                          std::map<std::string, std::vector<ObjectId>> instances,
                          std::uint64_t nextId) {
  records_ = std::move(records);
  instances_ = std::move(instances);
  for (const auto& name : schema_->class_names()) instances_[name];
  nextId_ = nextId;
}

}  // namespace reqexec
