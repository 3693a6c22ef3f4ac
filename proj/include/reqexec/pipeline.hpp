#pragma once

// parse -> (CRUD synthesis) -> resolve -> type check -> compile, with every
// stage's problems collected as located diagnostics.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqexec/decomposer.hpp"
#include "reqexec/parser.hpp"
#include "reqexec/resolver.hpp"

namespace reqexec {

struct Diagnostic {
  enum class Kind { Syntax, Name, Type, Compile } kind = Kind::Syntax;
  std::string file;
  SourceLoc location;
  std::string message;
};

const char* to_string(Diagnostic::Kind k);
/// `file:line:col: kind error: message` (file and position omitted when unknown).
std::string to_string(const Diagnostic& d);

struct LoadedModel {
  RequirementsModel parsed;
  std::shared_ptr<const ResolvedModel> resolved;
  std::vector<CompiledOperation> operations;
};

struct BuildOptions {
  bool includeCrud = false;
};

struct BuildResult {
  std::optional<LoadedModel> model;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

BuildResult build_model(const std::vector<SourceFile>& sources, BuildOptions options = {});
BuildResult build_model_files(const std::vector<std::string>& paths, BuildOptions options = {});

}  // namespace reqexec
