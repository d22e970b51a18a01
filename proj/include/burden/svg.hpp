#pragma once

#include <string>
#include <utility>
#include <vector>

namespace burden {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool draw_line = false;  // scatter by default
  std::string color = "#1f77b4";
};

// Minimal self-contained SVG chart: axes, ticks, labels, scatter or line
// series. Inputs come from already-written CSVs; the charts never compute
// metrics themselves.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace burden
