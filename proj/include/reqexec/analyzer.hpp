#pragma once

// Model complexity and executability statistics.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reqexec/decomposer.hpp"
#include "reqexec/model.hpp"

namespace reqexec {

struct ComplexityMetrics {
  int actors = 0;
  int useCases = 0;
  /// Number of contracts.
  int systemOperations = 0;
  int entityClasses = 0;
  /// Directed association ends.
  int associations = 0;
  int invariants = 0;
  /// Post-plan instructions over all operations, ForEach bodies included.
  /// Informational; not comparable with the AO column of published tables.
  int planInstructions = 0;

  friend bool operator==(const ComplexityMetrics&, const ComplexityMetrics&) = default;
};

ComplexityMetrics complexity_metrics(const RequirementsModel& model,
                                     const std::vector<CompiledOperation>& ops);

/// Instructions in `plan`, counting nested ForEach bodies.
int count_instructions(const InstructionList& plan);

enum class ReportFormat { Text, Json };

/// "text" or "json"; nullopt otherwise.
std::optional<ReportFormat> parse_report_format(std::string_view name);

nlohmann::json report_json(const ComplexityMetrics& m, const ExecutabilityReport& e);
/// Inverse of the "complexity" member of `report_json`; throws
/// std::invalid_argument on a malformed document.
ComplexityMetrics metrics_from_json(const nlohmann::json& report);

std::string render_report(const ComplexityMetrics& m, const ExecutabilityReport& e,
                          ReportFormat format);

}  // namespace reqexec
