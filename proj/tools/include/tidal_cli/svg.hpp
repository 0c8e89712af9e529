#pragma once

// Minimal SVG 1.1 line plots: axes, tick labels, one polyline per series.

#include <string>
#include <vector>

namespace tidal::cli {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
};

std::string svg_plot(const std::vector<Series>& series, const PlotLabels& labels);

}  // namespace tidal::cli
