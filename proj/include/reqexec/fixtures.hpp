#pragma once

// Bundled requirements-model fixtures, addressed by name.

#include <string>
#include <vector>

#include "reqexec/model.hpp"

namespace reqexec {

/// atm, miniCocome, libmsSubset, loanpsSubset, cocomeEnterItem,
/// cashPaymentMissingGuard, withdrawWrongGuard, endSaleSignTypo.
std::vector<std::string> fixture_names();

/// The four case-study models (no faulty variants, no excerpts).
std::vector<std::string> case_study_names();

/// Absolute path of the fixture's `.rqm` file. Throws std::invalid_argument
/// for an unknown name.
std::string fixture_path(const std::string& name);

/// Parses the fixture. Throws std::invalid_argument for an unknown name and
/// std::runtime_error if it does not parse cleanly.
RequirementsModel load_fixture(const std::string& name);

}  // namespace reqexec
