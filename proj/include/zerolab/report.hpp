#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace zerolab {

inline constexpr int kSchemaVersion = 1;

/// One CSV row: a statistic at level p (p = 0 for run-wide values).
struct CsvRow {
  int p = 0;
  std::string statistic;
  double value = 0.0;
  double stderr_ = 0.0;
  long nsamples = 0;
};

/// Header p,statistic,value,stderr,nsamples,seed,config_hash; doubles as
/// %.17g, RFC 4180 quoting for text fields.
std::string render_csv(const std::vector<CsvRow>& rows, std::uint64_t seed, const std::string& config_hash);

std::string csv_quote(const std::string& field);

/// Writes to a temporary file next to `path`, then renames it into place,
/// so a killed run never leaves a partial file under the final name.
/// Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Non-finite doubles become null.
nlohmann::json json_number(double v);

}  // namespace zerolab
