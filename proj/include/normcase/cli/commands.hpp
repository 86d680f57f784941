#pragma once

#include <atomic>
#include <filesystem>
#include <ostream>

namespace normcase::cli {

enum ExitCode : int { kSuccess = 0, kViolations = 1, kInputError = 2 };

int cmd_validate(const std::filesystem::path& spec, std::ostream& out, std::ostream& err);

/// Scenario file: `clock`, `assignments`, `steps` (assign / execute /
/// advance-clock / impose) and an optional `expect` map of act statuses.
int cmd_run(const std::filesystem::path& spec, const std::filesystem::path& scenario, bool as_json, std::ostream& out,
            std::ostream& err);

int cmd_tree(const std::filesystem::path& spec, const std::filesystem::path& state, int depth, bool as_json,
             std::ostream& out, std::ostream& err);

/// Runs until `stop` becomes true or SIGINT/SIGTERM arrives.
int cmd_serve(const std::filesystem::path& config, std::ostream& out, std::ostream& err,
              std::atomic<bool>* stop = nullptr);

/// Parses argv and dispatches; usage errors exit with kInputError.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace normcase::cli
