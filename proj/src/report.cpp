#include "specpert/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "specpert/errors.hpp"

namespace specpert {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

fs::path write_report(const Report& report, const fs::path& dir) {
  if (report.name.empty()) throw ValidationError("report has no name");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  const fs::path csv = dir / (report.name + ".csv");
  {
    auto out = open_for_write(csv);
    for (std::size_t c = 0; c < report.columns.size(); ++c) out << (c ? "," : "") << report.columns[c];
    out << '\n';
    for (const auto& row : report.rows) {
      if (row.size() != report.columns.size())
        throw ValidationError("report '" + report.name + "': row width does not match the header");
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
      out << '\n';
    }
    finish(out, csv);
  }
  const fs::path sidecar = dir / (report.name + ".json");
  {
    auto out = open_for_write(sidecar);
    nlohmann::json meta = report.metadata;
    meta["columns"] = report.columns;
    meta["row_count"] = report.rows.size();
    out << meta.dump(2) << '\n';
    finish(out, sidecar);
  }
  return csv;
}

Report read_report_csv(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ValidationError("cannot open '" + csv_path.string() + "'");
  Report r;
  r.name = csv_path.stem().string();
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + csv_path.string() + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ValidationError(csv_path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != r.columns.size())
      throw ValidationError(csv_path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    r.rows.push_back(std::move(row));
  }
  return r;
}

Report spectral_measure_report(const SpectralMeasure& m, const std::string& name) {
  Report r;
  r.name = name;
  r.columns = {"j", "lambda_eps", "weight"};
  r.rows.reserve(m.atoms.size());
  for (std::size_t j = 0; j < m.atoms.size(); ++j)
    r.rows.push_back({static_cast<double>(j + 1), m.atoms[j].location, m.atoms[j].weight});
  r.metadata["basis_index"] = m.basis_index + 1;
  r.metadata["total_mass"] = m.total_mass();
  return r;
}

}  // namespace specpert
