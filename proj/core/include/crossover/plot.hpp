#pragma once

#include <string>
#include <vector>

namespace crossover {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double error = 0.0;  // half-height of the error bar, 0 for none
};

struct PlotSeries {
  std::string label;
  std::vector<PlotPoint> points;
  bool markers_only = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

// Standalone SVG document. Output depends only on the chart contents.
std::string render_svg(const LineChart& chart);

}  // namespace crossover
