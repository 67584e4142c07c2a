#pragma once

#include <filesystem>
#include <vector>

#include "config.hpp"

namespace lindlab::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNumericalFailure = 2, kInvariantFailure = 3 };

struct CommandResult {
  int exit_code = kSuccess;
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json summary;
};

CommandResult run_spectrum(const RunConfig& config);
CommandResult run_variance_scan(const RunConfig& config);
CommandResult run_quench(const RunConfig& config);
CommandResult run_rate_scan(const RunConfig& config);
CommandResult run_perturb(const RunConfig& config);
CommandResult run_verify(const RunConfig& config);

/// Validates, dispatches on config.command and maps exceptions to exit codes
/// (message written to `err`).
CommandResult run_command(const RunConfig& config, std::ostream& err);

}  // namespace lindlab::cli
