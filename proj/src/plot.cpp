#include "magsteer/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "magsteer/errors.hpp"

namespace magsteer {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::pair<double, double> finite_range(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-300) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

void save(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  os << body;
  if (!os) throw Error("cannot write plot '" + path.string() + "'");
}

void frame(std::ostringstream& os, const std::string& title,
           const std::string& x_label, double x0, double x1, double y0,
           double y1, const std::string& y_label) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  os << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << pw
     << "' height='" << ph << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << kLeft + pw / 2 << "' y='24' text-anchor='middle' "
        "font-size='15'>" << title << "</text>\n";
  os << "<text x='" << kLeft + pw / 2 << "' y='" << kHeight - 12
     << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  if (!y_label.empty()) {
    os << "<text x='16' y='" << kTop + ph / 2
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
       << kTop + ph / 2 << ")'>" << y_label << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double fx = kLeft + pw * i / 4.0;
    const double fy = kTop + ph - ph * i / 4.0;
    os << "<text x='" << fx << "' y='" << kTop + ph + 16
       << "' text-anchor='middle' font-size='11'>"
       << num(x0 + (x1 - x0) * i / 4.0) << "</text>\n";
    os << "<text x='" << kLeft - 6 << "' y='" << fy + 4
       << "' text-anchor='end' font-size='11'>"
       << num(y0 + (y1 - y0) * i / 4.0) << "</text>\n";
  }
}

}  // namespace

void write_line_plot_svg(const std::filesystem::path& path,
                         const std::string& title, const std::string& x_label,
                         const std::vector<double>& x,
                         const std::vector<Series>& series) {
  std::vector<double> all;
  for (const auto& s : series) all.insert(all.end(), s.y.begin(), s.y.end());
  const auto [x0, x1] = finite_range(x);
  const auto [y0, y1] = finite_range(all);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + pw * (v - x0) / (x1 - x0); };
  auto py = [&](double v) { return kTop + ph - ph * (v - y0) / (y1 - y0); };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
     << "' height='" << kHeight << "'>\n";
  frame(os, title, x_label, x0, x1, y0, y1, "");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    os << "<polyline fill='none' stroke='" << colour
       << "' stroke-width='1.8' points='";
    for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
      if (!std::isfinite(series[k].y[i])) continue;
      os << num(px(x[i])) << ',' << num(py(series[k].y[i])) << ' ';
    }
    os << "'/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(k);
    os << "<line x1='" << kWidth - kRight + 10 << "' y1='" << ly << "' x2='"
       << kWidth - kRight + 30 << "' y2='" << ly << "' stroke='" << colour
       << "' stroke-width='2'/>\n";
    os << "<text x='" << kWidth - kRight + 36 << "' y='" << ly + 4
       << "' font-size='12'>" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  save(path, os.str());
}

void write_heatmap_svg(const std::filesystem::path& path,
                       const std::string& title, const std::string& x_label,
                       const std::vector<double>& x, const std::string& y_label,
                       const std::vector<double>& y,
                       const std::vector<double>& values) {
  const auto [x0, x1] = finite_range(x);
  const auto [y0, y1] = finite_range(y);
  const auto [v0, v1] = finite_range(values);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(std::max<std::size_t>(1, x.size()));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(1, y.size()));

  auto colour = [&](double v) {
    if (!std::isfinite(v)) return std::string("#cccccc");
    const double t = std::clamp((v - v0) / (v1 - v0), 0.0, 1.0);
    // Blue to yellow.
    const int r = static_cast<int>(40 + 215 * t);
    const int g = static_cast<int>(40 + 190 * t);
    const int b = static_cast<int>(160 - 120 * t);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
     << "' height='" << kHeight << "'>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double v = values[i * y.size() + j];
      os << "<rect x='" << num(kLeft + cw * i) << "' y='"
         << num(kTop + ph - ch * (j + 1)) << "' width='" << num(cw + 0.5)
         << "' height='" << num(ch + 0.5) << "' fill='" << colour(v)
         << "'/>\n";
    }
  }
  frame(os, title, x_label, x0, x1, y0, y1, y_label);
  os << "<text x='" << kWidth - kRight + 10 << "' y='" << kTop + 14
     << "' font-size='12'>max " << num(v1) << "</text>\n";
  os << "<text x='" << kWidth - kRight + 10 << "' y='" << kTop + 32
     << "' font-size='12'>min " << num(v0) << "</text>\n";
  os << "</svg>\n";
  save(path, os.str());
}

}  // namespace magsteer
