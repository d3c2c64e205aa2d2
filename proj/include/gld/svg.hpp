#pragma once

#include <string>
#include <vector>

namespace gld {

// Minimal line chart writer. One polyline per series over a shared x axis,
// fixed palette, axis ticks at nice round values.
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartConfig {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 440;
};

std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const ChartConfig& cfg);

}  // namespace gld
