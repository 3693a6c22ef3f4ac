#pragma once

#include <string>

#include "reqexec/model.hpp"

namespace reqexec {

/// Renders an expression in DSL syntax with the minimum parentheses needed for
/// `parse_ocl_expr` to rebuild the same tree.
std::string print_expr(const Expr& expr);
std::string print_expr(const ExprPtr& expr);

/// Renders a whole model as `.rqm` text.
std::string print_model(const RequirementsModel& model);

std::string quote_string(std::string_view s);

}  // namespace reqexec
