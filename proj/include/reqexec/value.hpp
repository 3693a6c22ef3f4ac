#pragma once

// Runtime values of OCL expressions.

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "reqexec/model.hpp"

namespace reqexec {

/// Identity of a live object; assigned from 1 upwards and never reused.
struct ObjectId {
  std::uint64_t value = 0;
  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
};

std::string to_string(ObjectId id);

/// Ordered, duplicate-free list of object references.
class RefSet {
 public:
  RefSet() = default;
  explicit RefSet(std::vector<ObjectId> ids);

  /// Appends unless already present; returns whether it was appended.
  bool insert(ObjectId id);
  bool erase(ObjectId id);
  bool contains(ObjectId id) const;
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<ObjectId>& ids() const { return ids_; }

  friend bool operator==(const RefSet&, const RefSet&) = default;

 private:
  std::vector<ObjectId> ids_;
};

struct Undefined {
  friend bool operator==(const Undefined&, const Undefined&) = default;
};

class Value {
 public:
  using Storage = std::variant<Undefined, std::int64_t, double, bool, std::string, ObjectId, RefSet>;

  Value() = default;
  static Value undefined() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Storage(v)); }
  static Value real(double v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value string(std::string v) { return Value(Storage(std::move(v))); }
  static Value ref(ObjectId id) { return Value(Storage(id)); }
  static Value refs(RefSet s) { return Value(Storage(std::move(s))); }

  bool is_undefined() const { return std::holds_alternative<Undefined>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_real() const { return std::holds_alternative<double>(v_); }
  bool is_number() const { return is_int() || is_real(); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_ref() const { return std::holds_alternative<ObjectId>(v_); }
  bool is_refs() const { return std::holds_alternative<RefSet>(v_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  /// Integer or Real as double.
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_real(); }
  bool as_bool() const { return std::get<bool>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  ObjectId as_ref() const { return std::get<ObjectId>(v_); }
  const RefSet& as_refs() const { return std::get<RefSet>(v_); }

  const Storage& storage() const { return v_; }

  /// Exact representation equality (no tolerance, no widening).
  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(Storage s) : v_(std::move(s)) {}
  Storage v_;
};

/// Human-readable rendering used in transcripts and diagnostics.
std::string to_string(const Value& v);

/// Short type tag: "Integer", "Real", "Boolean", "String", "Ref", "RefSet",
/// "Undefined".
const char* type_name(const Value& v);

/// Whether `v` may be stored in a slot of type `t` (Integer widens to Real;
/// Undefined always fits).
bool conforms(const Value& v, PrimType t);

/// Converts a conforming value to the slot's representation (Integer → Real).
Value coerce(const Value& v, PrimType t);

/// Default absolute tolerance for Real equality.
inline constexpr double kDefaultTolerance = 1e-9;

/// OCL equality between two defined values: numbers compare numerically with
/// the absolute tolerance; strings by content; references by identity.
bool values_equal(const Value& a, const Value& b, double tolerance);

}  // namespace reqexec
