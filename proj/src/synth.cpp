#include "wafergp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "wafergp/error.hpp"
#include "wafergp/gpr.hpp"
#include "wafergp/rng.hpp"

namespace wafergp {

namespace {

/// Smooth zero-mean field sampled from an RBF-covariance GP on a coarse
/// grid (spacing ~ length_scale/2), read through bilinear interpolation.
class CoarseField {
 public:
  CoarseField(int width, int height, double length_scale, double std_dev, Rng& rng) {
    h_ = std::max(1.0, length_scale / 2.0);
    h_ = std::min(h_, std::max(1.0, static_cast<double>(std::max(width, height)) / 2.0));
    mx_ = static_cast<int>(std::floor(static_cast<double>(width - 1) / h_)) + 2;
    my_ = static_cast<int>(std::floor(static_cast<double>(height - 1) / h_)) + 2;

    const int m = mx_ * my_;
    Eigen::MatrixX2d coords(m, 2);
    for (int j = 0; j < my_; ++j) {
      for (int i = 0; i < mx_; ++i) {
        coords(j * mx_ + i, 0) = i * h_;
        coords(j * mx_ + i, 1) = j * h_;
      }
    }

    const Hyperparams<double> hp{length_scale, 1.0, 0.0};
    Eigen::MatrixXd k = kernel_matrix(coords, hp);
    Eigen::LLT<Eigen::MatrixXd> llt;
    cholesky_with_jitter(k, llt, 1e-10);

    Eigen::VectorXd normals(m);
    for (int i = 0; i < m; ++i) normals(i) = rng.normal();
    Eigen::VectorXd flat = llt.matrixL() * normals;
    z_ = std_dev * flat;
  }

  double at(double x, double y) const {
    const double u = x / h_;
    const double v = y / h_;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    i0 = std::clamp(i0, 0, mx_ - 2);
    j0 = std::clamp(j0, 0, my_ - 2);
    const double fu = u - i0;
    const double fv = v - j0;
    const double z00 = z_(j0 * mx_ + i0);
    const double z10 = z_(j0 * mx_ + i0 + 1);
    const double z01 = z_((j0 + 1) * mx_ + i0);
    const double z11 = z_((j0 + 1) * mx_ + i0 + 1);
    return (1 - fu) * (1 - fv) * z00 + fu * (1 - fv) * z10 + (1 - fu) * fv * z01 +
           fu * fv * z11;
  }

 private:
  double h_ = 1.0;
  int mx_ = 0;
  int my_ = 0;
  Eigen::VectorXd z_;
};

int disk_count(int side, double radius) {
  const double c = (side - 1) / 2.0;
  const double r2 = radius * radius;
  int count = 0;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double dx = x - c;
      const double dy = y - c;
      if (dx * dx + dy * dy <= r2) ++count;
    }
  }
  return count;
}

}  // namespace

Dataset gen_wafer(const WaferSynthConfig& cfg) {
  if (cfg.approx_devices < 100) {
    throw Error("invalid-config", "approx_devices must be >= 100");
  }
  if (!(cfg.field_length_scale > 0.0)) {
    throw Error("invalid-config", "field_length_scale must be positive");
  }
  if (cfg.noise_std < 0.0 || cfg.field_std < 0.0) {
    throw Error("invalid-config", "field_std and noise_std must be non-negative");
  }

  // Square grid sized so the inscribed disk holds ~approx_devices cells,
  // then a radius search to land the count as close as the lattice allows.
  const double target = static_cast<double>(cfg.approx_devices);
  const int side = static_cast<int>(std::ceil(2.0 * std::sqrt(target / M_PI)));
  double lo = 1.0;
  double hi = side / 2.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (disk_count(side, mid) < cfg.approx_devices) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double radius =
      std::abs(disk_count(side, lo) - cfg.approx_devices) <
              std::abs(disk_count(side, hi) - cfg.approx_devices)
          ? lo
          : hi;
  const int count = disk_count(side, radius);
  if (std::abs(count - cfg.approx_devices) > 0.05 * target) {
    throw Error("infeasible-device-count",
                "disk mask yields " + std::to_string(count) + " devices; wanted within 5% of " +
                    std::to_string(cfg.approx_devices));
  }

  Rng rng(cfg.seed);
  const CoarseField field(side, side, cfg.field_length_scale, cfg.field_std, rng);

  const double c = (side - 1) / 2.0;
  const double r2 = radius * radius;
  std::vector<SpatialSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double dx = x - c;
      const double dy = y - c;
      const double d2 = dx * dx + dy * dy;
      if (d2 > r2) continue;
      const double rho2 = d2 / r2;  // normalized squared radius in [0,1]
      double value = cfg.radial_trend_amplitude * rho2 + field.at(x, y);
      if (cfg.noise_std > 0.0) value += cfg.noise_std * rng.normal();
      samples.push_back({x, y, value, true});
    }
  }

  DatasetMeta meta;
  meta.source = cfg.source_label;
  meta.measurement = "performance";
  meta.unit = "au";
  return Dataset::from_samples(std::move(samples), meta,
                               GridBounds{0, 0, side, side});
}

std::vector<Dataset> gen_fpga(const FpgaSynthConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1 || cfg.n_points < 1 || cfg.n_paths < 1) {
    throw Error("invalid-config", "width, height, n_points and n_paths must be positive");
  }
  if (cfg.n_points > cfg.width * cfg.height) {
    throw Error("invalid-config",
                "n_points = " + std::to_string(cfg.n_points) + " exceeds grid capacity " +
                    std::to_string(cfg.width * cfg.height));
  }
  if (!(cfg.field_length_scale > 0.0)) {
    throw Error("invalid-config", "field_length_scale must be positive");
  }
  if (cfg.noise_std < 0.0 || cfg.field_std < 0.0 || cfg.path_offset_std < 0.0 ||
      cfg.family_field_std < 0.0) {
    throw Error("invalid-config", "spread parameters must be non-negative");
  }
  if (cfg.family_field_std > 0.0 && !(cfg.family_length_scale > 0.0)) {
    throw Error("invalid-config", "family_length_scale must be positive");
  }
  if (cfg.column_period < 0) {
    throw Error("invalid-config", "column_period must be non-negative");
  }
  if (cfg.row_regions < 0 || cfg.row_regions > cfg.height) {
    throw Error("invalid-config", "row_regions must lie in [0, height]");
  }
  if (cfg.row_step_amp != 0.0 && !(cfg.row_step_width > 0.0)) {
    throw Error("invalid-config", "row_step_width must be positive");
  }

  Rng rng(cfg.seed);
  const CoarseField field(cfg.width, cfg.height, cfg.field_length_scale, cfg.field_std, rng);

  // The layout constant pins the family signature independently of
  // cfg.seed, so every device shares one fabric map.
  std::optional<CoarseField> family;
  if (cfg.family_field_std > 0.0) {
    Rng layout_rng(UINT64_C(0x09e667f3bcc908b2));
    family.emplace(cfg.width, cfg.height, cfg.family_length_scale,
                   cfg.family_field_std, layout_rng);
  }

  // Per-row level from the clock-region bands. Heights vary up to 2:1, and
  // levels follow a zigzag (even ranks ascending, then odd ranks descending)
  // so neighbouring bands never jump more than two steps while bands with
  // adjacent levels sit far apart. Two smoothing passes keep the seams
  // within reach of the smooth-field model.
  std::vector<double> row_level(static_cast<std::size_t>(cfg.height), 0.0);
  if (cfg.row_regions > 0) {
    const std::size_t regions = static_cast<std::size_t>(cfg.row_regions);
    std::vector<double> weight(regions);
    double total = 0.0;
    for (double& w : weight) {
      w = 1.0 + rng.uniform01();
      total += w;
    }
    std::vector<int> level_of;
    level_of.reserve(regions);
    for (std::size_t r = 0; r < regions; r += 2) level_of.push_back(static_cast<int>(r));
    if (regions >= 2) {
      for (std::size_t r = regions - (regions % 2 == 0 ? 1 : 2); ; r -= 2) {
        level_of.push_back(static_cast<int>(r));
        if (r < 2) break;
      }
    }

    std::vector<double> raw(static_cast<std::size_t>(cfg.height));
    std::size_t region = 0;
    double next_cut = weight[0] / total * cfg.height;
    for (int y = 0; y < cfg.height; ++y) {
      while (y + 0.5 > next_cut && region + 1 < regions) {
        ++region;
        next_cut += weight[region] / total * cfg.height;
      }
      raw[static_cast<std::size_t>(y)] = level_of[region] * cfg.region_step;
    }
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> smooth(raw.size());
      for (int y = 0; y < cfg.height; ++y) {
        double sum = 0.0;
        int count = 0;
        for (int j = y - 3; j <= y + 3; ++j) {
          if (j >= 0 && j < cfg.height) {
            sum += raw[static_cast<std::size_t>(j)];
            ++count;
          }
        }
        smooth[static_cast<std::size_t>(y)] = sum / count;
      }
      raw.swap(smooth);
    }
    row_level = raw;
  }

  // One occupancy layout shared by every path, in row-major cell order.
  std::vector<int> cells =
      rng.sample_without_replacement(cfg.width * cfg.height, cfg.n_points);
  std::sort(cells.begin(), cells.end());

  std::vector<double> base(static_cast<std::size_t>(cfg.n_points));
  std::vector<std::pair<int, int>> coords(static_cast<std::size_t>(cfg.n_points));
  for (int i = 0; i < cfg.n_points; ++i) {
    const int x = cells[static_cast<std::size_t>(i)] % cfg.width;
    const int y = cells[static_cast<std::size_t>(i)] / cfg.width;
    coords[static_cast<std::size_t>(i)] = {x, y};
    double v = field.at(x, y) + cfg.row_gradient * y + row_level[static_cast<std::size_t>(y)];
    if (family) v += family->at(x, y);
    if (cfg.row_step_amp != 0.0) {
      v += cfg.row_step_amp * std::tanh((y - cfg.row_step_pos) / cfg.row_step_width);
    }
    if (cfg.column_period > 0) {
      v += ((x / cfg.column_period) % 2 == 0 ? -0.5 : 0.5) * cfg.column_offset;
    }
    base[static_cast<std::size_t>(i)] = v;
  }

  std::vector<Dataset> out;
  out.reserve(static_cast<std::size_t>(cfg.n_paths));
  for (int p = 0; p < cfg.n_paths; ++p) {
    const double offset = cfg.path_offset_std > 0.0 ? cfg.path_offset_std * rng.normal() : 0.0;
    std::vector<SpatialSample> samples;
    samples.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
      double value = base[static_cast<std::size_t>(i)] + offset;
      if (cfg.noise_std > 0.0) value += cfg.noise_std * rng.normal();
      samples.push_back(
          {coords[static_cast<std::size_t>(i)].first, coords[static_cast<std::size_t>(i)].second, value, true});
    }
    char label[32];
    std::snprintf(label, sizeof label, "/path-%02d", p);
    DatasetMeta meta;
    meta.source = cfg.source_label + label;
    meta.measurement = "ro_frequency";
    meta.unit = "MHz";
    out.push_back(Dataset::from_samples(std::move(samples), meta,
                                        GridBounds{0, 0, cfg.width, cfg.height}));
  }
  return out;
}

}  // namespace wafergp
