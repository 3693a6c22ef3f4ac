#pragma once

// Typed-value JSON encoding shared by checkpoints and the HTTP service.

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reqexec/object_store.hpp"
#include "reqexec/value.hpp"

namespace reqexec {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `{"Integer": 3}`, `{"Real": 2.5}`, `{"Boolean": true}`, `{"String": "x"}`,
/// `{"Ref": 4}`, `{"RefSet": [1, 2]}`; Undefined is `null`.
nlohmann::json value_to_json(const Value& v);
/// Throws CheckpointError on anything that is not a typed value.
Value value_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_json(const ObjectStore& store);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string save_checkpoint(const ObjectStore& store);

/// Replaces the store's content. On a malformed or inconsistent document
/// throws CheckpointError and leaves `store` untouched.
void load_checkpoint(ObjectStore& store, std::string_view text);
void load_checkpoint_json(ObjectStore& store, const nlohmann::json& doc);

}  // namespace reqexec
