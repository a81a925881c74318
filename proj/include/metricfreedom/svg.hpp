#pragma once

// Minimal self-contained SVG plots: a heatmap for budget sweeps and a
// scatter with a fitted line. Output depends only on the inputs.

#include "metricfreedom/lift.hpp"
#include "metricfreedom/resample.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>

namespace mf::svg {

struct HeatmapOptions {
  std::string title = "F_hat by evaluation budget";
  std::optional<std::pair<int, int>> operating_point = std::pair{6, 6};  // (M, N), outlined
};

/// Rows are M values, columns N values. Cells without an estimate are grey.
std::string sweep_heatmap(std::span<const SweepCell> cells, const HeatmapOptions& options = {});

struct ScatterOptions {
  std::string title = "Metric freedom vs normalized lift";
  std::string x_label = "F";
  std::string y_label = "lift_norm";
};

std::string scatter_with_line(std::span<const double> xs, std::span<const double> ys,
                              std::span<const std::string> labels, std::optional<LinearFit> fit,
                              const ScatterOptions& options = {});

}  // namespace mf::svg
