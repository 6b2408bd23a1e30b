#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace heatlab {

/// Minimal vector-graphics line plot (one polyline per series). Optional
/// artifact only; nothing downstream parses these files.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

inline void write_line_plot(const std::string& path, const std::vector<PlotSeries>& series,
                            const std::string& title, bool log_x = false, bool log_y = false) {
  const double width = 640, height = 480, margin = 56;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double v) { return margin + (tx(v) - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double v) {
    return height - margin - (ty(v) - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write plot: " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='14'>" << title
     << "</text>\n";
  os << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
     << "' y2='" << height - margin << "' stroke='black'/>\n";
  os << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
     << height - margin << "' stroke='black'/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << colors[ci % 5] << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : s.points) os << px(x) << "," << py(y) << " ";
    os << "'/>\n";
    os << "<text x='" << width - margin + 4 << "' y='" << margin + 16 * ci
       << "' font-size='11' fill='" << colors[ci % 5] << "'>" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace heatlab
