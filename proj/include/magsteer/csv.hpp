#pragma once

// CSV output: comma separated, '.' decimal point, 17 significant digits.
// The first line is a comment carrying the schema version and the resolved
// run configuration; the second is the header.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "magsteer/experiments.hpp"
#include "magsteer/measures.hpp"

namespace magsteer {

/// Bump whenever column names or their order change.
inline constexpr int kCsvSchemaVersion = 1;

std::string format_number(double value);

/// MetricsRecord column names in output order.
const std::vector<std::string>& metrics_columns();
std::vector<std::string> metrics_fields(const MetricsRecord& rec);

void write_csv_preamble(std::ostream& os, const std::string& config_json);

/// Axis columns first, then the MetricsRecord columns.
void write_sweep_csv(std::ostream& os, const SweepGrid& grid,
                     const std::string& config_json);

/// One-row CSV: named input columns, then the MetricsRecord columns.
void write_point_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, double>>& inputs,
                     const MetricsRecord& rec, const std::string& config_json);

}  // namespace magsteer
