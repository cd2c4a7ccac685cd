#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zerolab/current_approx.hpp"
#include "zerolab/equidistribution.hpp"
#include "zerolab/error.hpp"

namespace zerolab {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class Command { Bergman, Sample, Equidist, Moderate, Constants, Approx };

std::string to_string(Command c);

/// Everything a run needs. The experiment part is shared with
/// run_experiment; the remaining fields belong to single commands.
struct RunConfig {
  Command command = Command::Equidist;
  ExperimentConfig experiment;

  // Universal-constant slots, used only as thresholds.
  double c0 = 0.5;
  double alpha0 = 0.5;
  double epsilon = 0.1;
  std::vector<int> d_kp;  ///< constants: explicit slot dimensions
  bool measure_R = false;  ///< constants: estimate R on the FS section space
  double rate_band = 0.0;  ///< equidist: max/min of median p / log p (0 = off)
  double max_failure_fraction = 1e-3;

  // moderate
  int moderate_N = 1;
  std::string probe = "log_z0";
  std::vector<double> alpha{1.0};
  std::vector<int> growth_N;
  std::vector<double> t_list;

  // approx
  TargetCurrent target = TargetCurrent::fs();
  RootStrategy strategy = RootStrategy::Stratified;
  int trials = 20;

  std::filesystem::path out_dir = ".";
  std::string csv_name = "results.csv";
  std::string json_name = "summary.json";
};

/// Sectioned key-value grammar, see docs/config.md. Throws ParseError for
/// malformed input and ValidationErrors listing every semantic violation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(print_config(c)) reproduces c.
std::string print_config(const RunConfig& c);

/// Experiment validation plus the command-specific checks.
void validate(const RunConfig& c);

/// FNV-1a of the canonical text, as 16 hex digits. The output directory
/// and thread count are left out.
std::string config_hash(const RunConfig& c);

}  // namespace zerolab
