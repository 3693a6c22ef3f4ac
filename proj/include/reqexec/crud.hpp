#pragma once

// CRUD contracts for classes marked `crud`, generated as ordinary DSL text so
// they take the same parse/resolve/compile path as hand-written contracts.

#include <string>

#include "reqexec/model.hpp"

namespace reqexec {

/// DSL text of use case `Manage<C>` with create/read/update/delete contracts.
/// Read, update and delete key on the class's first declared attribute; a
/// class without attributes only gets `create<C>()`.
std::string crud_source(const ConceptualClass& cls, const std::string& actor);

/// Copy of `model` extended with the CRUD use cases of every crud-marked
/// class. Classes whose `Manage<C>` use case is already declared are skipped.
/// When the model declares no actor, actor `Administrator` is added.
RequirementsModel with_crud(const RequirementsModel& model);

}  // namespace reqexec
