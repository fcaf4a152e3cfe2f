#pragma once

// Tabular experiment output: a CSV table plus a JSON metadata sidecar.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specpert/spectra.hpp"

namespace specpert {

struct Report {
  // File stem; the CSV goes to <dir>/<name>.csv and the sidecar to <dir>/<name>.json.
  std::string name;
  std::vector<std::string> columns;
  // Missing values are NaN and print as "nan".
  std::vector<std::vector<double>> rows;
  nlohmann::json metadata = nlohmann::json::object();
};

/// 15 significant digits, "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

/// Writes the CSV and the sidecar, creating `dir` if needed. Returns the CSV path.
std::filesystem::path write_report(const Report& report, const std::filesystem::path& dir);

/// Reads back a CSV written by write_report (columns and numeric rows only).
Report read_report_csv(const std::filesystem::path& csv_path);

/// Table with columns `j, lambda_eps, weight`; j is one-based.
Report spectral_measure_report(const SpectralMeasure& m, const std::string& name);

}  // namespace specpert
