#include "reqexec/fixtures.hpp"

#include <map>
#include <stdexcept>

#include "reqexec/parser.hpp"

#ifndef REQEXEC_FIXTURE_DIR
#define REQEXEC_FIXTURE_DIR "fixtures"
#endif

namespace reqexec {

namespace {

const std::vector<std::pair<std::string, std::string>>& table() {
  static const std::vector<std::pair<std::string, std::string>> t = {
      {"atm", "atm.rqm"},
      {"miniCocome", "mini_cocome.rqm"},
      {"libmsSubset", "libms_subset.rqm"},
      {"loanpsSubset", "loanps_subset.rqm"},
      {"cocomeEnterItem", "cocome_enter_item.rqm"},
      {"cashPaymentMissingGuard", "faulty/cash_payment_missing_guard.rqm"},
      {"withdrawWrongGuard", "faulty/withdraw_wrong_guard.rqm"},
      {"endSaleSignTypo", "faulty/end_sale_sign_typo.rqm"},
  };
  return t;
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : table()) out.push_back(name);
  return out;
}

std::vector<std::string> case_study_names() {
  return {"atm", "miniCocome", "libmsSubset", "loanpsSubset"};
}

std::string fixture_path(const std::string& name) {
  for (const auto& [n, file] : table()) {
    if (n == name) return std::string(REQEXEC_FIXTURE_DIR) + "/" + file;
  }
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

RequirementsModel load_fixture(const std::string& name) {
  ParseResult r = parse_model_files({fixture_path(name)});
  if (!r.ok()) {
    throw std::runtime_error("fixture " + name + " does not parse: " +
                             to_string(r.diagnostics.front()));
  }
  return std::move(*r.model);
}

}  // namespace reqexec
