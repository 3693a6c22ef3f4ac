#include "reqexec/analyzer.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace reqexec {

int count_instructions(const InstructionList& plan) {
  int n = 0;
  for (const auto& ins : plan) {
    ++n;
    if (const auto* loop = ins.as<instr::ForEach>()) n += count_instructions(loop->body);
  }
  return n;
}

ComplexityMetrics complexity_metrics(const RequirementsModel& model,
                                     const std::vector<CompiledOperation>& ops) {
  ComplexityMetrics m;
  m.actors = static_cast<int>(model.actors.size());
  m.useCases = static_cast<int>(model.useCases.size());
  m.systemOperations = static_cast<int>(model.contracts.size());
  m.entityClasses = static_cast<int>(model.classes.size());
  m.associations = static_cast<int>(model.associations.size());
  m.invariants = static_cast<int>(model.invariants.size());
  for (const auto& op : ops) m.planInstructions += count_instructions(op.postPlan);
  return m;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

namespace {

const char* kFields[] = {"actors",       "useCases",   "systemOperations", "entityClasses",
                         "associations", "invariants", "planInstructions"};

int* field(ComplexityMetrics& m, int i) {
  int* f[] = {&m.actors,       &m.useCases,   &m.systemOperations, &m.entityClasses,
              &m.associations, &m.invariants, &m.planInstructions};
  return f[i];
}

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", rate);
  return buf;
}

}  // namespace

nlohmann::json report_json(const ComplexityMetrics& m, const ExecutabilityReport& e) {
  nlohmann::json complexity = nlohmann::json::object();
  ComplexityMetrics copy = m;
  for (int i = 0; i < 7; ++i) complexity[kFields[i]] = *field(copy, i);
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : e.operations) {
    ops.push_back({{"useCase", op.useCase},
                   {"operation", op.operation},
                   {"status", op.executable ? "executable" : "partially_executable"},
                   {"hooks", op.hooks}});
  }
  return {{"schemaVersion", 1},
          {"complexity", complexity},
          {"executability",
           {{"total", e.total()},
            {"executable", e.executable()},
            {"successRate", e.success_rate()},
            {"operations", ops}}}};
}

ComplexityMetrics metrics_from_json(const nlohmann::json& report) {
  if (!report.is_object() || !report.contains("complexity") || !report["complexity"].is_object())
    throw std::invalid_argument("report lacks a 'complexity' object");
  const auto& c = report["complexity"];
  ComplexityMetrics m;
  for (int i = 0; i < 7; ++i) {
    if (!c.contains(kFields[i]) || !c[kFields[i]].is_number_integer())
      throw std::invalid_argument(std::string("complexity lacks integer '") + kFields[i] + "'");
    *field(m, i) = c[kFields[i]].get<int>();
  }
  return m;
}

std::string render_report(const ComplexityMetrics& m, const ExecutabilityReport& e,
                          ReportFormat format) {
  if (format == ReportFormat::Json) return report_json(m, e).dump(2) + "\n";
  std::ostringstream os;
  auto row = [&](const char* label, const std::string& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %-20s %s\n", label, value.c_str());
    os << buf;
  };
  os << "complexity\n";
  row("actors", std::to_string(m.actors));
  row("use cases", std::to_string(m.useCases));
  row("system operations", std::to_string(m.systemOperations));
  row("entity classes", std::to_string(m.entityClasses));
  row("associations", std::to_string(m.associations));
  row("invariants", std::to_string(m.invariants));
  row("plan instructions", std::to_string(m.planInstructions) + " (not the AO count)");
  os << "executability\n";
  row("executable", std::to_string(e.executable()) + "/" + std::to_string(e.total()));
  row("success rate", percent(e.success_rate()));
  for (const auto& op : e.operations) {
    if (op.executable) continue;
    std::string hooks;
    for (const auto& h : op.hooks) hooks += (hooks.empty() ? "" : ", ") + h;
    os << "  partially executable " << op.useCase << "::" << op.operation << " (hooks: " << hooks
       << ")\n";
  }
  return os.str();
}

}  // namespace reqexec
