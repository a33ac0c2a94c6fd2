#pragma once

// Minimal SVG rendering of sweep results. CSV output stays authoritative;
// these files are for a quick look.

#include <filesystem>
#include <string>
#include <vector>

namespace magsteer {

struct Series {
  std::string label;
  std::vector<double> y;
};

void write_line_plot_svg(const std::filesystem::path& path,
                         const std::string& title, const std::string& x_label,
                         const std::vector<double>& x,
                         const std::vector<Series>& series);

/// values is row-major over (x, y) with x varying slowest.
void write_heatmap_svg(const std::filesystem::path& path,
                       const std::string& title, const std::string& x_label,
                       const std::vector<double>& x, const std::string& y_label,
                       const std::vector<double>& y,
                       const std::vector<double>& values);

}  // namespace magsteer
