#pragma once

// The live object graph: per-class instance lists, attribute slots, links and
// the primitive operations every compiled plan is built from.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reqexec/model.hpp"
#include "reqexec/value.hpp"

namespace reqexec {

struct ClassInfo {
  std::string name;
  std::optional<std::string> superClass;
  /// Inherited attributes first, then the class's own, in declaration order.
  std::vector<Attribute> attributes;
  /// Association ends owned by the class or any ancestor.
  std::vector<AssociationEnd> roles;
};

/// Class table synthesized from the conceptual class diagram.
class Schema {
 public:
  Schema() = default;
  /// Expects a model whose class and association declarations are valid
  /// (unique names, acyclic inheritance, declared targets).
  static Schema from_model(const RequirementsModel& model);

  const ClassInfo* find(std::string_view cls) const;
  const ClassInfo& at(std::string_view cls) const;
  /// Reflexive: a class conforms to itself.
  bool conforms_to(std::string_view cls, std::string_view ancestor) const;
  /// `cls` and every class deriving from it.
  std::vector<std::string> with_descendants(std::string_view cls) const;
  const Attribute* attribute(std::string_view cls, std::string_view name) const;
  const AssociationEnd* role(std::string_view cls, std::string_view name) const;
  const std::vector<std::string>& class_names() const { return order_; }

 private:
  std::map<std::string, ClassInfo, std::less<>> classes_;
  std::vector<std::string> order_;
};

enum class StoreErrorKind {
  UnknownClass,
  DanglingRef,
  UnknownAttribute,
  UnknownRole,
  TypeMismatch,
  MultiplicityMismatch,
};

const char* to_string(StoreErrorKind k);

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  StoreErrorKind kind() const { return kind_; }

 private:
  StoreErrorKind kind_;
};

struct OneLink {
  std::optional<ObjectId> target;
  friend bool operator==(const OneLink&, const OneLink&) = default;
};
struct ManyLink {
  RefSet targets;
  friend bool operator==(const ManyLink&, const ManyLink&) = default;
};
using LinkSlot = std::variant<OneLink, ManyLink>;

struct ObjectRecord {
  ObjectId id;
  std::string className;
  std::map<std::string, Value> attributes;
  std::map<std::string, LinkSlot> links;
  friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

/// A condition over a candidate object.
using ObjectPredicate = std::function<bool(ObjectId)>;

class ObjectStore {
 public:
  explicit ObjectStore(std::shared_ptr<const Schema> schema);

  const Schema& schema() const { return *schema_; }
  std::shared_ptr<const Schema> schema_ptr() const { return schema_; }

  // Objects
  Value find_object(std::string_view cls, const ObjectPredicate& cond) const;
  RefSet find_objects(std::string_view cls, const ObjectPredicate& cond = {}) const;
  Value create_object(std::string_view cls);
  bool add_object(std::string_view cls, ObjectId ref);
  bool release_object(std::string_view cls, ObjectId ref);

  // Attributes
  Value get_attribute(ObjectId ref, std::string_view attr) const;
  bool set_attribute(ObjectId ref, std::string_view attr, const Value& value);

  // Links
  Value find_linked_object(ObjectId ref, std::string_view role,
                           const ObjectPredicate& cond = {}) const;
  RefSet find_linked_objects(ObjectId ref, std::string_view role,
                             const ObjectPredicate& cond = {}) const;
  bool add_link_one_to_many(ObjectId ref, std::string_view role, ObjectId target);
  bool add_link_one_to_one(ObjectId ref, std::string_view role, ObjectId target);
  bool remove_link_one_to_many(ObjectId ref, std::string_view role, ObjectId target);
  bool remove_link_one_to_one(ObjectId ref, std::string_view role);

  /// Added, unreleased objects of `cls` and its subclasses in creation order.
  RefSet all_instances(std::string_view cls) const;

  bool exists(ObjectId id) const { return records_.count(id) != 0; }
  const ObjectRecord* record(ObjectId id) const;
  const ObjectRecord& at(ObjectId id) const;
  const std::map<ObjectId, ObjectRecord>& records() const { return records_; }
  /// Instance list per class exactly as maintained by add/release.
  const std::map<std::string, std::vector<ObjectId>>& instance_lists() const { return instances_; }
  std::uint64_t next_id() const { return nextId_; }

  /// Replaces the whole content; used when restoring a checkpoint. The caller
  /// is responsible for consistency with the schema.
  void restore(std::map<ObjectId, ObjectRecord> records,
               std::map<std::string, std::vector<ObjectId>> instances, std::uint64_t nextId);

  /// Fresh record for `cls` with every slot empty; the caller assigns `id`.
  ObjectRecord blank_record(std::string_view cls) const;

  friend bool operator==(const ObjectStore& a, const ObjectStore& b) {
    return a.nextId_ == b.nextId_ && a.records_ == b.records_ && a.instances_ == b.instances_;
  }

 private:
  ObjectRecord& live(ObjectId id);
  const ObjectRecord& live(ObjectId id) const;
  const ClassInfo& known_class(std::string_view cls) const;
  const AssociationEnd& known_role(const ObjectRecord& rec, std::string_view role) const;

  std::shared_ptr<const Schema> schema_;
  std::map<std::string, std::vector<ObjectId>> instances_;
  std::map<ObjectId, ObjectRecord> records_;
  std::uint64_t nextId_ = 1;
};

}  // namespace reqexec
