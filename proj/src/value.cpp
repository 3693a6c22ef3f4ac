#include "reqexec/value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "reqexec/printer.hpp"

namespace reqexec {

std::string to_string(ObjectId id) { return "#" + std::to_string(id.value); }

RefSet::RefSet(std::vector<ObjectId> ids) {
  for (ObjectId id : ids) insert(id);
}

bool RefSet::insert(ObjectId id) {
  if (contains(id)) return false;
  ids_.push_back(id);
  return true;
}

bool RefSet::erase(ObjectId id) {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return false;
  ids_.erase(it);
  return true;
}

bool RefSet::contains(ObjectId id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) return "null";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.15g", x);
          std::string s = buf;
          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
          return s;
        } else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return quote_string(x);
        else if constexpr (std::is_same_v<T, ObjectId>) return to_string(x);
        else {
          std::string s = "{";
          for (std::size_t i = 0; i < x.ids().size(); ++i) {
            if (i) s += ", ";
            s += to_string(x.ids()[i]);
          }
          return s + "}";
        }
      },
      v.storage());
}

const char* type_name(const Value& v) {
  if (v.is_undefined()) return "Undefined";
  if (v.is_int()) return "Integer";
  if (v.is_real()) return "Real";
  if (v.is_bool()) return "Boolean";
  if (v.is_string()) return "String";
  if (v.is_ref()) return "Ref";
  return "RefSet";
}

bool conforms(const Value& v, PrimType t) {
  if (v.is_undefined()) return true;
  switch (t) {
    case PrimType::Integer: return v.is_int();
    case PrimType::Real: return v.is_number();
    case PrimType::Boolean: return v.is_bool();
    case PrimType::String: return v.is_string();
  }
  return false;
}

Value coerce(const Value& v, PrimType t) {
  if (t == PrimType::Real && v.is_int()) return Value::real(static_cast<double>(v.as_int()));
  return v;
}

bool values_equal(const Value& a, const Value& b, double tolerance) {
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
    return std::fabs(a.as_number() - b.as_number()) <= tolerance;
  }
  return a == b;
}

}  // namespace reqexec
