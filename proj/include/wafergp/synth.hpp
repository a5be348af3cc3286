#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wafergp/dataset.hpp"

namespace wafergp {

/// Generator settings for a synthetic wafer map: a circular disk of devices
/// on a square grid, values = radial quadratic trend + smooth correlated
/// field + independent noise.
struct WaferSynthConfig {
  int approx_devices = 6000;
  double radial_trend_amplitude = 1.0;
  double field_length_scale = 8.0;  ///< grid units
  double field_std = 1.0;
  double noise_std = 0.05;
  std::uint64_t seed = 0;
  std::string source_label = "wafer";
};

/// Generator settings for a synthetic multi-path FPGA fingerprint: one
/// occupancy layout shared by all paths, values = common field + per-path
/// offset + per-path noise.
struct FpgaSynthConfig {
  int width = 33;
  int height = 120;
  int n_points = 3173;
  int n_paths = 32;
  double field_length_scale = 10.0;
  double field_std = 1.0;
  // Fabric-systematic component: one fixed layout field shared by every
  // device of the family, the way identical dies repeat their spatial
  // signature. Drawn from an internal layout constant, not cfg.seed.
  // 0 disables.
  double family_field_std = 0.0;
  double family_length_scale = 8.0;
  // Systematic value drift per row step, shared by all paths of a device.
  double row_gradient = 0.0;
  // Smooth systematic shift between the lower and upper die halves:
  // row_step_amp * tanh((y - row_step_pos) / row_step_width). Deterministic,
  // so every device of the family shares it. 0 amplitude disables.
  double row_step_amp = 0.0;
  double row_step_pos = 60.0;
  double row_step_width = 12.0;
  // Alternating column-block shift emulating heterogeneous fabric columns;
  // blocks of column_period columns sit column_offset apart. 0 disables.
  int column_period = 0;
  double column_offset = 0.0;
  // Clock-region row banding: row_regions horizontal bands of rng-varied
  // height on a region_step level lattice, zigzag-ordered so equal-level
  // bands sit far apart, with seams smoothed into ramps. 0 disables.
  int row_regions = 0;
  double region_step = 1.0;
  double path_offset_std = 0.5;
  double noise_std = 0.05;
  std::uint64_t seed = 0;
  std::string source_label = "fpga";
};

/// Builds one wafer dataset; device count lands within 5% of
/// cfg.approx_devices. Deterministic per seed.
Dataset gen_wafer(const WaferSynthConfig& cfg);

/// Builds cfg.n_paths datasets sharing one occupancy layout; the dataset for
/// path p carries source "<label>/path-<p>". Deterministic per seed.
std::vector<Dataset> gen_fpga(const FpgaSynthConfig& cfg);

}  // namespace wafergp
