#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace magsense::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Plain SVG 1.1 polyline chart; no styling contract beyond readable axes and a legend.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;

  std::string render() const;
};

void write_svg(const std::filesystem::path& path, const LinePlot& plot);

}  // namespace magsense::cli
