#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "magsense/cli/csv.hpp"
#include "magsense/cli/svg.hpp"
#include "magsense/model.hpp"

namespace magsense::cli {

/// Squeeze amplitudes drawn as separate curves in the frequency figures.
inline const std::vector<double> kFigureSqueezes = {0.0, 0.5, 1.0, 1.5};

struct FigureDataset {
  std::string stem;  // file name without extension
  CsvTable table;
  LinePlot plot;
};

/// Uniform grid on [0, max] with `points` samples (max and 0 included exactly).
Eigen::ArrayXd uniform_grid(double max, std::size_t points);

/// Hash of the canonical parameter text; stamped on every CSV.
std::string parameter_hash(const SystemParameters& params);

/// Datasets for fig3 ... fig8. Throws std::invalid_argument on an unknown name.
std::vector<FigureDataset> figure_datasets(std::string_view figure, const SystemParameters& base,
                                           std::size_t points = 1001);

}  // namespace magsense::cli
