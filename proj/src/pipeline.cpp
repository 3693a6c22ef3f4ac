#include "reqexec/pipeline.hpp"

#include "reqexec/crud.hpp"

namespace reqexec {

const char* to_string(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::Syntax: return "syntax";
    case Diagnostic::Kind::Name: return "name";
    case Diagnostic::Kind::Type: return "type";
    case Diagnostic::Kind::Compile: return "compile";
  }
  return "?";
}

std::string to_string(const Diagnostic& d) {
  std::string out;
  if (!d.file.empty()) out += d.file + ":";
  if (d.location.line > 0)
    out += std::to_string(d.location.line) + ":" + std::to_string(d.location.col) + ":";
  if (!out.empty()) out += " ";
  return out + to_string(d.kind) + " error: " + d.message;
}

namespace {

BuildResult finish(ParseResult parsed, BuildOptions options) {
  BuildResult out;
  for (const auto& d : parsed.diagnostics) {
    if (d.severity == ParseDiagnostic::Severity::Error)
      out.diagnostics.push_back({Diagnostic::Kind::Syntax, d.file, d.location, d.message});
  }
  if (!parsed.ok()) return out;

  RequirementsModel model = options.includeCrud ? with_crud(*parsed.model) : *parsed.model;
  ResolveResult resolved = resolve_names(model);
  if (!resolved.ok()) {
    for (const auto& e : resolved.errors)
      out.diagnostics.push_back(
          {Diagnostic::Kind::Name, {}, e.location, "'" + e.name + "': expected " + e.expectedKind});
    return out;
  }
  auto rm = std::make_shared<const ResolvedModel>(std::move(*resolved.model));
  std::vector<TypeError> typeErrors = check_types(*rm);
  if (!typeErrors.empty()) {
    for (const auto& e : typeErrors)
      out.diagnostics.push_back({Diagnostic::Kind::Type, {}, e.location, e.message});
    return out;
  }
  CompileResult compiled = compile_model(*rm);
  if (!compiled.errors.empty()) {
    for (const auto& e : compiled.errors)
      out.diagnostics.push_back({Diagnostic::Kind::Compile, {}, e.location, e.message});
    return out;
  }
  out.model = LoadedModel{std::move(model), std::move(rm), std::move(compiled.operations)};
  return out;
}

}  // namespace

BuildResult build_model(const std::vector<SourceFile>& sources, BuildOptions options) {
  return finish(parse_model(sources), options);
}

BuildResult build_model_files(const std::vector<std::string>& paths, BuildOptions options) {
  return finish(parse_model_files(paths), options);
}

}  // namespace reqexec
