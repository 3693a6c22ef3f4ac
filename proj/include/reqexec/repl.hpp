#pragma once

// Line-oriented interactive front end over an Executor. Output is stable and
// golden-testable: every command line is echoed as `> command`, comment lines
// (`# ...`) and blank lines are echoed unchanged.

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "reqexec/executor.hpp"

namespace reqexec {

/// Parses REPL argument literals: 42, -1.5, true, false, null, "text", #3.
/// Throws std::invalid_argument on anything else.
std::vector<Value> parse_arguments(std::string_view text);

/// Per-class object tables in schema order, as printed by `state`.
std::string render_state(const ObjectStore& store);
/// One line per violated invariant, or "invariants: all hold".
std::string render_invariants(const InvariantReport& report);

class Repl {
 public:
  Repl(Executor& executor, std::ostream& out) : executor_(executor), out_(out) {}

  /// Runs one line; returns false after `quit`.
  bool execute_line(const std::string& line);
  /// Runs lines until end of input or `quit`. Returns the number of commands
  /// that reported an error.
  int run(std::istream& in);

  /// Lines starting with "> " in a transcript, without the prefix.
  static std::vector<std::string> commands_of(const std::string& transcript);

 private:
  void cmd_list();
  void cmd_invoke(const std::string& rest);
  void cmd_save(const std::string& path);
  void cmd_load(const std::string& path);
  Session& session_for(const std::string& useCase);

  Executor& executor_;
  std::ostream& out_;
  std::map<std::string, Session> sessions_;
  int errors_ = 0;
};

}  // namespace reqexec
