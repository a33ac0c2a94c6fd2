#include "magsteer/csv.hpp"

#include <cmath>
#include <cstdio>

namespace magsteer {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "SX1", "SY1", "SX2",    "SY2",     "E12",     "G12",    "G21",  "GS",
      "na",  "n1",  "n2",     "stable",  "margin",  "E12_raw", "G12_raw",
      "G21_raw"};
  return columns;
}

std::vector<std::string> metrics_fields(const MetricsRecord& rec) {
  return {format_number(rec.s_x1),    format_number(rec.s_y1),
          format_number(rec.s_x2),    format_number(rec.s_y2),
          format_number(rec.e12),     format_number(rec.g12),
          format_number(rec.g21),     format_number(rec.gs),
          format_number(rec.pop_a),   format_number(rec.pop_1),
          format_number(rec.pop_2),   rec.stable ? "1" : "0",
          format_number(rec.margin),  format_number(rec.e12_raw),
          format_number(rec.g12_raw), format_number(rec.g21_raw)};
}

void write_csv_preamble(std::ostream& os, const std::string& config_json) {
  os << "# magsteer-csv schema=" << kCsvSchemaVersion
     << " config=" << config_json << '\n';
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    os << (i ? "," : "") << fields[i];
  }
  os << '\n';
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepGrid& grid,
                     const std::string& config_json) {
  write_csv_preamble(os, config_json);
  std::vector<std::string> header;
  for (const auto& axis : grid.axes) header.push_back(axis.name);
  for (const auto& col : metrics_columns()) header.push_back(col);
  write_row(os, header);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row;
    for (double c : grid.coordinates[i]) row.push_back(format_number(c));
    for (auto& f : metrics_fields(grid.records[i])) row.push_back(std::move(f));
    write_row(os, row);
  }
}

void write_point_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, double>>& inputs,
                     const MetricsRecord& rec, const std::string& config_json) {
  write_csv_preamble(os, config_json);
  std::vector<std::string> header;
  std::vector<std::string> row;
  for (const auto& [name, value] : inputs) {
    header.push_back(name);
    row.push_back(format_number(value));
  }
  for (const auto& col : metrics_columns()) header.push_back(col);
  for (auto& f : metrics_fields(rec)) row.push_back(std::move(f));
  write_row(os, header);
  write_row(os, row);
}

}  // namespace magsteer
