#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wafergp {

/// One measurement point on the grid: die position (wafer) or RO cell
/// (FPGA), the measured value, and a pass/fail flag.
struct SpatialSample {
  int x = 0;
  int y = 0;
  double value = 0.0;
  bool valid = true;

  friend bool operator==(const SpatialSample&, const SpatialSample&) = default;
};

struct DatasetMeta {
  std::string source;       ///< file or generator identity, e.g. "wafer-03"
  std::string measurement;  ///< e.g. "dynamic_current", "ro_frequency"
  std::string unit;         ///< e.g. "mA", "MHz"

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Inclusive-origin rectangular bounds of the measurement grid.
struct GridBounds {
  int min_x = 0;
  int min_y = 0;
  int width = 1;
  int height = 1;

  bool contains(int x, int y) const {
    return x >= min_x && x < min_x + width && y >= min_y && y < min_y + height;
  }

  friend bool operator==(const GridBounds&, const GridBounds&) = default;
};

/// Immutable, validated collection of samples on a grid.
///
/// Construction rejects duplicate coordinates, non-finite values on valid
/// samples, and samples outside the declared bounds. When no bounds are
/// given they are inferred as the [min, max] box of the observed
/// coordinates.
class Dataset {
 public:
  Dataset() = default;

  static Dataset from_samples(std::vector<SpatialSample> samples, DatasetMeta meta,
                              std::optional<GridBounds> bounds = std::nullopt);

  const std::vector<SpatialSample>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  const GridBounds& bounds() const { return bounds_; }
  int grid_width() const { return bounds_.width; }
  int grid_height() const { return bounds_.height; }
  const DatasetMeta& meta() const { return meta_; }

  /// N x 2 real coordinate matrix in sample order, for the regression core.
  Eigen::MatrixX2d coordinates() const;
  /// Value vector in sample order.
  Eigen::VectorXd values() const;

  bool operator==(const Dataset& other) const {
    return samples_ == other.samples_ && bounds_ == other.bounds_ &&
           meta_ == other.meta_;
  }

 private:
  std::vector<SpatialSample> samples_;
  GridBounds bounds_;
  DatasetMeta meta_;
};

/// Affine value standardization state: v_norm = (v - mean) / std_dev.
/// std_dev uses the population (N) divisor.
struct NormParams {
  double mean = 0.0;
  double std_dev = 1.0;

  double normalize(double v) const { return (v - mean) / std_dev; }
  double denormalize(double v) const { return v * std_dev + mean; }
};

/// Column-name selection for CSV ingestion. An empty `valid` means: use a
/// column of that default name if the header has one, otherwise mark every
/// sample valid. `require_valid` turns a missing valid column into an error.
struct CsvSchema {
  std::string x = "x";
  std::string y = "y";
  std::string value = "value";
  std::string valid = "valid";
  bool require_valid = false;
};

Dataset parse_csv(std::istream& in, const CsvSchema& schema = {}, DatasetMeta meta = {});
Dataset parse_csv_file(const std::string& path, const CsvSchema& schema = {});

void write_csv(const Dataset& d, std::ostream& out);
/// Atomic write: temp file in the target directory, then rename.
void write_csv_file(const Dataset& d, const std::string& path);

/// Drops samples with valid == false; order preserved. Errors when fewer
/// than 2 valid samples remain.
Dataset filter_faulty(const Dataset& d);

/// Mean/population-std of a value vector. Errors on N < 2 or zero variance.
NormParams compute_norm_params(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Standardizes the dataset's values to mean 0, std 1 and returns the
/// parameters needed to undo the map.
std::pair<Dataset, NormParams> normalize_values(const Dataset& d);

}  // namespace wafergp
