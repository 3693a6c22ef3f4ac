#pragma once

// Shared helpers for the unit, property and acceptance binaries.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reqexec/executor.hpp"
#include "reqexec/pipeline.hpp"

namespace reqexec::testing {

std::string read_file(const std::string& path);
std::string source_dir();
std::string golden_path(const std::string& name);

/// Builds a bundled fixture; throws std::runtime_error with the diagnostics
/// on failure. CRUD synthesis is on, as at run time.
LoadedModel build_fixture(const std::string& name, bool includeCrud = true);
LoadedModel build_source(const std::string& text, bool includeCrud = true);

const CompiledOperation& find_op(const LoadedModel& m, const std::string& useCase,
                                 const std::string& op);

/// A value of type `t` from the small pools shared by arguments and seeded
/// stores.
Value pooled_value(PrimType t, std::mt19937_64& rng);

/// Random arguments drawn from small pools so that lookups by key hit
/// existing objects often.
std::vector<Value> random_args(const CompiledOperation& op, std::mt19937_64& rng);

/// Registers a stub for every hook of every operation. Stubs return a value
/// of the hook's declared return type (empty set, 0, false, "") or true.
void register_stub_hooks(Executor& ex);

struct OracleOpStats {
  int attempts = 0;
  int ok = 0;
  int verified = 0;
  std::vector<std::string> failures;
};

struct OracleStats {
  std::map<std::string, OracleOpStats> perOperation;  // "UC::op", hook-free ops only
  long invocations = 0;
  bool complete = false;  // every op reached the target
};

/// Random walks over the hook-free operations of `model` until every one of
/// them produced `target` Ok outcomes (or `maxInvocations` is spent). Every
/// Ok outcome is checked with `verify_postcondition`.
OracleStats run_postcondition_oracle(const LoadedModel& model, int target, std::uint64_t seed,
                                     long maxInvocations = 400000);

struct AtomicityCase {
  std::string operation;
  std::string failure;  // "guard", "hook", "division"
  bool attempted = false;
  bool identical = false;
  std::string note;
};

/// For every operation, engineers a guard failure (when the guard can be made
/// false), an unbound-hook failure and a division fault, and compares the
/// checkpoint serialization and session bindings before and after.
std::vector<AtomicityCase> run_atomicity(const LoadedModel& model, std::uint64_t seed);

/// Up to three added objects per class with pooled attribute values and
/// random links; the starting state of some random walks.
ObjectStore seeded_store(std::shared_ptr<const Schema> schema, std::mt19937_64& rng);

/// A random store over `schema` with at most `maxObjects` objects and
/// `maxLinks` link targets; some objects are released, some never added.
ObjectStore random_store(std::shared_ptr<const Schema> schema, std::mt19937_64& rng,
                         int maxObjects, int maxLinks);

/// Runs the commands of a REPL transcript (lines starting with "> ", plus
/// comment and blank lines) against the model named in its `# model:` header
/// and returns the produced transcript.
std::string replay_transcript(const std::string& transcript);

}  // namespace reqexec::testing
