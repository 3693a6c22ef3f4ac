#pragma once

// Parser for the `.rqm` requirements DSL and its OCL contract subset.

#include <optional>
#include <string>
#include <vector>

#include "reqexec/model.hpp"

namespace reqexec {

struct SourceFile {
  std::string path;
  std::string content;
};

struct ParseDiagnostic {
  enum class Severity { Error, Warning } severity = Severity::Error;
  std::string file;
  SourceLoc location;
  std::string message;
};

std::string to_string(const ParseDiagnostic& d);

struct ParseResult {
  std::optional<RequirementsModel> model;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Parses and merges all files into one model. Any Error diagnostic means no
/// model is returned; the parser recovers at the next top-level declaration so
/// that every syntax error in the input is reported.
ParseResult parse_model(const std::vector<SourceFile>& sources);

struct ExprParseResult {
  ExprPtr expr;
  std::optional<ParseDiagnostic> diagnostic;
};

/// Parses a single OCL expression. Either `expr` or `diagnostic` is set.
ExprParseResult parse_ocl_expr(std::string_view text);

/// Reads the files from disk; an unreadable file yields an Error diagnostic.
ParseResult parse_model_files(const std::vector<std::string>& paths);

}  // namespace reqexec
