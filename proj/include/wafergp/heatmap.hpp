#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wafergp/dataset.hpp"
#include "wafergp/sampling.hpp"

namespace wafergp {

struct HeatmapOptions {
  int cell_px = 8;            ///< rendered size of one grid cell
  std::string title;          ///< optional caption above the map
};

/// Renders a dataset as a static SVG heatmap: one rect of class "cell" per
/// sample, a sequential color ramp, and a min/max legend. `values` overrides
/// the dataset's own values (parallel to d.samples()); `plan` outlines its
/// train cells.
std::string render_heatmap_svg(const Dataset& d, const HeatmapOptions& opts = {},
                               const std::vector<double>* values = nullptr,
                               const SamplingPlan* plan = nullptr);

}  // namespace wafergp
