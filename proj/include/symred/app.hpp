#pragma once

// Command implementations behind the `symred` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "symred/config.hpp"

namespace symred::app {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kAmbiguity = 3 };

struct RunOptions {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance_scale;
};

struct RunResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string report_path;  // empty when nothing was written
};

/// Executes the configuration's tasks in order and writes report.json and
/// trajectory CSVs into the output directory.
RunResult run(const nlohmann::json& config, const RunOptions& options, std::ostream& log);
RunResult run_file(const std::string& path, const RunOptions& options, std::ostream& log);
RunResult run_builtin(const std::string& name, const RunOptions& options, std::ostream& log);
/// Every builtin's verification suite; report.json under the output
/// directory (default "symred_verify").
RunResult run_verify_all(const RunOptions& options, std::ostream& log);

nlohmann::json versions();

}  // namespace symred::app
