#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerolab/config.hpp"
#include "zerolab/report.hpp"

namespace zerolab {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitThreshold = 2 };

struct CommandResult {
  std::vector<CsvRow> rows;
  nlohmann::json summary;  ///< command-specific part of the JSON report
  bool thresholds_passed = true;
  std::vector<std::string> threshold_failures;
};

/// Runs the pipeline of `config.command` without touching the filesystem
/// (apart from the optional cache).
CommandResult execute(const RunConfig& config);

/// execute plus the CSV and JSON artifacts under config.out_dir. Returns
/// 0, or 2 when a threshold check failed. Errors propagate as exceptions.
int run_command(const RunConfig& config);

/// Structured error document for the CLI.
nlohmann::json error_json(const std::exception& e);

}  // namespace zerolab
