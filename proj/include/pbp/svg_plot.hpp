#pragma once

#include <string>
#include <vector>

namespace pbp {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal static line chart (axes, tick labels, legend). Good enough for the
// offroad-rate-vs-horizon curves; not a general plotting facility.
void write_svg_line_chart(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<SvgSeries>& series);

}  // namespace pbp
