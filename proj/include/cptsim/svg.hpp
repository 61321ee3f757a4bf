#pragma once

#include <string>
#include <vector>

namespace cpt {

// Minimal self-contained SVG line plots (axes, ticks, legend); diagnostic
// quality, no external plotting stack.
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
  bool markers = false;
};

struct SvgPlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<SvgSeries> series;
  int width = 720;
  int height = 480;

  void add(std::vector<double> x, std::vector<double> y, std::string color,
           std::string label, bool markers = false);
  std::string render() const;
  void write(const std::string& path) const;
};

}  // namespace cpt
