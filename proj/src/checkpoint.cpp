#include "reqexec/checkpoint.hpp"

#include <cmath>
#include <set>

namespace reqexec {

using nlohmann::json;

namespace {

json real_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw CheckpointError("Real value must be a number");
}

ObjectId id_from_json(const json& j, const char* what) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0)
    throw CheckpointError(std::string(what) + " must be a positive integer id");
  return ObjectId{j.get<std::uint64_t>()};
}

}  // namespace

json value_to_json(const Value& v) {
  if (v.is_undefined()) return nullptr;
  if (v.is_int()) return json{{"Integer", v.as_int()}};
  if (v.is_real()) return json{{"Real", real_to_json(v.as_real())}};
  if (v.is_bool()) return json{{"Boolean", v.as_bool()}};
  if (v.is_string()) return json{{"String", v.as_string()}};
  if (v.is_ref()) return json{{"Ref", v.as_ref().value}};
  json ids = json::array();
  for (ObjectId id : v.as_refs().ids()) ids.push_back(id.value);
  return json{{"RefSet", ids}};
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value::undefined();
  if (!j.is_object() || j.size() != 1)
    throw CheckpointError("typed value must be null or a single-key object");
  const auto& [tag, v] = *j.items().begin();
  if (tag == "Integer") {
    if (!v.is_number_integer()) throw CheckpointError("Integer value must be an integer");
    return Value::integer(v.get<std::int64_t>());
  }
  if (tag == "Real") return Value::real(real_from_json(v));
  if (tag == "Boolean") {
    if (!v.is_boolean()) throw CheckpointError("Boolean value must be true or false");
    return Value::boolean(v.get<bool>());
  }
  if (tag == "String") {
    if (!v.is_string()) throw CheckpointError("String value must be a string");
    return Value::string(v.get<std::string>());
  }
  if (tag == "Ref") return Value::ref(id_from_json(v, "Ref"));
  if (tag == "RefSet") {
    if (!v.is_array()) throw CheckpointError("RefSet value must be an array");
    RefSet s;
    for (const auto& x : v) {
      if (!s.insert(id_from_json(x, "RefSet element")))
        throw CheckpointError("RefSet contains a duplicate id");
    }
    return Value::refs(std::move(s));
  }
  throw CheckpointError("unknown value tag '" + tag + "'");
}

json checkpoint_json(const ObjectStore& store) {
  json objects = json::array();
  for (const auto& [id, rec] : store.records()) {
    json attrs = json::object();
    for (const auto& [name, v] : rec.attributes) attrs[name] = value_to_json(v);
    json links = json::object();
    for (const auto& [role, slot] : rec.links) {
      if (const auto* one = std::get_if<OneLink>(&slot)) {
        links[role] = one->target ? json(one->target->value) : json(nullptr);
      } else {
        json ids = json::array();
        for (ObjectId t : std::get<ManyLink>(slot).targets.ids()) ids.push_back(t.value);
        links[role] = ids;
      }
    }
    objects.push_back(json{{"id", id.value}, {"class", rec.className}, {"attrs", attrs},
                           {"links", links}});
  }
  json instances = json::object();
  for (const auto& [cls, ids] : store.instance_lists()) {
    if (ids.empty()) continue;
    json arr = json::array();
    for (ObjectId id : ids) arr.push_back(id.value);
    instances[cls] = arr;
  }
  return json{{"nextId", store.next_id()}, {"objects", objects}, {"instances", instances}};
}

std::string save_checkpoint(const ObjectStore& store) {
  return checkpoint_json(store).dump(2) + "\n";
}

void load_checkpoint(ObjectStore& store, std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw CheckpointError("checkpoint is not well-formed JSON");
  load_checkpoint_json(store, doc);
}

void load_checkpoint_json(ObjectStore& store, const json& doc) {
  const Schema& schema = store.schema();
  if (!doc.is_object()) throw CheckpointError("checkpoint must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "nextId" && key != "objects" && key != "instances")
      throw CheckpointError("unexpected top-level key '" + key + "'");
  }
  if (!doc.contains("nextId") || !doc["nextId"].is_number_unsigned())
    throw CheckpointError("missing or invalid 'nextId'");
  if (!doc.contains("objects") || !doc["objects"].is_array())
    throw CheckpointError("missing or invalid 'objects'");
  const std::uint64_t nextId = doc["nextId"].get<std::uint64_t>();
  if (nextId == 0) throw CheckpointError("'nextId' must be positive");

  std::map<ObjectId, ObjectRecord> records;
  for (const auto& o : doc["objects"]) {
    if (!o.is_object()) throw CheckpointError("object entry must be a JSON object");
    for (const char* key : {"id", "class", "attrs", "links"}) {
      if (!o.contains(key)) throw CheckpointError(std::string("object entry lacks '") + key + "'");
    }
    ObjectId id = id_from_json(o["id"], "object id");
    if (id.value >= nextId) throw CheckpointError(to_string(id) + " is not below nextId");
    if (!o["class"].is_string()) throw CheckpointError("object class must be a string");
    const std::string cls = o["class"].get<std::string>();
    if (!schema.find(cls)) throw CheckpointError("unknown class '" + cls + "'");
    ObjectRecord rec = store.blank_record(cls);
    rec.id = id;
    if (!o["attrs"].is_object()) throw CheckpointError("'attrs' must be an object");
    for (const auto& [name, v] : o["attrs"].items()) {
      const Attribute* a = schema.attribute(cls, name);
      if (!a) throw CheckpointError("class " + cls + " has no attribute '" + name + "'");
      Value val = value_from_json(v);
      if (!conforms(val, a->type))
        throw CheckpointError(to_string(id) + "." + name + " is not a " + to_string(a->type));
      rec.attributes[name] = coerce(val, a->type);
    }
    if (!o["links"].is_object()) throw CheckpointError("'links' must be an object");
    for (const auto& [role, v] : o["links"].items()) {
      const AssociationEnd* r = schema.role(cls, role);
      if (!r) throw CheckpointError("class " + cls + " has no role '" + role + "'");
      if (r->multiplicity == Multiplicity::One) {
        OneLink link;
        if (!v.is_null()) link.target = id_from_json(v, "link target");
        rec.links[role] = link;
      } else {
        if (!v.is_array()) throw CheckpointError("many-role '" + role + "' must be an array");
        ManyLink link;
        for (const auto& t : v) {
          if (!link.targets.insert(id_from_json(t, "link target")))
            throw CheckpointError("many-role '" + role + "' repeats a target");
        }
        rec.links[role] = link;
      }
    }
    if (!records.emplace(id, std::move(rec)).second)
      throw CheckpointError("duplicate object id " + to_string(id));
  }

  auto check_target = [&](const ObjectRecord& rec, const std::string& role, ObjectId t) {
    auto it = records.find(t);
    if (it == records.end())
      throw CheckpointError(to_string(rec.id) + "." + role + " refers to missing " + to_string(t));
    const AssociationEnd* r = schema.role(rec.className, role);
    if (!schema.conforms_to(it->second.className, r->target))
      throw CheckpointError(to_string(rec.id) + "." + role + " target " + to_string(t) +
                            " is not a " + r->target);
  };
  for (const auto& [id, rec] : records) {
    for (const auto& [role, slot] : rec.links) {
      if (const auto* one = std::get_if<OneLink>(&slot)) {
        if (one->target) check_target(rec, role, *one->target);
      } else {
        for (ObjectId t : std::get<ManyLink>(slot).targets.ids()) check_target(rec, role, t);
      }
    }
  }

  std::map<std::string, std::vector<ObjectId>> instances;
  if (doc.contains("instances")) {
    if (!doc["instances"].is_object()) throw CheckpointError("'instances' must be an object");
    for (const auto& [cls, ids] : doc["instances"].items()) {
      if (!schema.find(cls)) throw CheckpointError("unknown class '" + cls + "' in instances");
      if (!ids.is_array()) throw CheckpointError("instance list of " + cls + " must be an array");
      std::set<ObjectId> seen;
      for (const auto& x : ids) {
        ObjectId id = id_from_json(x, "instance id");
        auto it = records.find(id);
        if (it == records.end())
          throw CheckpointError("instance list of " + cls + " refers to missing " + to_string(id));
        if (!schema.conforms_to(it->second.className, cls))
          throw CheckpointError(to_string(id) + " in instance list of " + cls + " is a " +
                                it->second.className);
        if (!seen.insert(id).second)
          throw CheckpointError("instance list of " + cls + " repeats " + to_string(id));
        instances[cls].push_back(id);
      }
    }
  } else {
    for (const auto& [id, rec] : records) instances[rec.className].push_back(id);
  }
  store.restore(std::move(records), std::move(instances), nextId);
}

}  // namespace reqexec
