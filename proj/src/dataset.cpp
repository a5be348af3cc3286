#include "wafergp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "wafergp/error.hpp"

namespace wafergp {

namespace {

struct CoordHash {
  std::size_t operator()(const std::pair<int, int>& p) const noexcept {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^
                                  static_cast<unsigned>(p.second));
  }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out, std::chars_format::general);
  return ec == std::errc{} && ptr == end;
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "1" || s == "true") {
    out = true;
    return true;
  }
  if (s == "0" || s == "false") {
    out = false;
    return true;
  }
  return false;
}

void format_value(char* buf, std::size_t n, double v) {
  std::snprintf(buf, n, "%.17g", v);
}

}  // namespace

Dataset Dataset::from_samples(std::vector<SpatialSample> samples, DatasetMeta meta,
                              std::optional<GridBounds> bounds) {
  if (samples.empty()) {
    throw Error("empty-dataset", "dataset has no samples");
  }

  std::unordered_set<std::pair<int, int>, CoordHash> seen;
  seen.reserve(samples.size());
  int min_x = std::numeric_limits<int>::max(), max_x = std::numeric_limits<int>::min();
  int min_y = std::numeric_limits<int>::max(), max_y = std::numeric_limits<int>::min();
  for (const SpatialSample& s : samples) {
    if (s.valid && !std::isfinite(s.value)) {
      throw Error("non-finite-value",
                  "valid sample at (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                      ") has a non-finite value");
    }
    if (!seen.insert({s.x, s.y}).second) {
      throw Error("duplicate-coordinate", "duplicate coordinate (" + std::to_string(s.x) +
                                              "," + std::to_string(s.y) + ")");
    }
    min_x = std::min(min_x, s.x);
    max_x = std::max(max_x, s.x);
    min_y = std::min(min_y, s.y);
    max_y = std::max(max_y, s.y);
  }

  Dataset d;
  d.samples_ = std::move(samples);
  d.meta_ = std::move(meta);
  if (bounds) {
    d.bounds_ = *bounds;
    for (const SpatialSample& s : d.samples_) {
      if (!d.bounds_.contains(s.x, s.y)) {
        throw Error("out-of-bounds", "sample (" + std::to_string(s.x) + "," +
                                         std::to_string(s.y) +
                                         ") lies outside the declared grid bounds");
      }
    }
  } else {
    d.bounds_ = GridBounds{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
  }
  return d;
}

Eigen::MatrixX2d Dataset::coordinates() const {
  Eigen::MatrixX2d pts(size(), 2);
  for (int i = 0; i < size(); ++i) {
    pts(i, 0) = static_cast<double>(samples_[static_cast<std::size_t>(i)].x);
    pts(i, 1) = static_cast<double>(samples_[static_cast<std::size_t>(i)].y);
  }
  return pts;
}

Eigen::VectorXd Dataset::values() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    v(i) = samples_[static_cast<std::size_t>(i)].value;
  }
  return v;
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema, DatasetMeta meta) {
  std::string line;
  long line_no = 0;

  // A comment of the form "# key=value" restores a meta field.
  auto absorb_meta = [&meta](std::string_view sv) {
    sv.remove_prefix(1);
    sv = trim(sv);
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) return;
    const std::string_view key = trim(sv.substr(0, eq));
    const std::string_view value = trim(sv.substr(eq + 1));
    if (key == "source") meta.source = std::string(value);
    if (key == "measurement") meta.measurement = std::string(value);
    if (key == "unit") meta.unit = std::string(value);
  };

  // Header: first non-comment, non-empty line.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      absorb_meta(sv);
      continue;
    }
    header = split_fields(sv);
    break;
  }
  if (header.empty()) {
    throw Error("csv-empty", "no header row found");
  }

  auto column_of = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };

  const int col_x = column_of(schema.x);
  const int col_y = column_of(schema.y);
  const int col_value = column_of(schema.value);
  const int col_valid = schema.valid.empty() ? -1 : column_of(schema.valid);
  if (col_x < 0) throw Error("csv-missing-column", "missing column '" + schema.x + "'");
  if (col_y < 0) throw Error("csv-missing-column", "missing column '" + schema.y + "'");
  if (col_value < 0) {
    throw Error("csv-missing-column", "missing column '" + schema.value + "'");
  }
  if (schema.require_valid && col_valid < 0) {
    throw Error("csv-missing-column", "missing column '" + schema.valid + "'");
  }
  const int needed = std::max({col_x, col_y, col_value, col_valid}) + 1;

  std::vector<SpatialSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::vector<std::string> fields = split_fields(sv);
    if (static_cast<int>(fields.size()) < needed) {
      throw Error("csv-malformed",
                  "line " + std::to_string(line_no) + ": expected at least " +
                      std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
    }

    SpatialSample s;
    if (!parse_int(fields[static_cast<std::size_t>(col_x)], s.x)) {
      throw Error("csv-malformed", "line " + std::to_string(line_no) + ", column '" +
                                       schema.x + "': not an integer: '" +
                                       fields[static_cast<std::size_t>(col_x)] + "'");
    }
    if (!parse_int(fields[static_cast<std::size_t>(col_y)], s.y)) {
      throw Error("csv-malformed", "line " + std::to_string(line_no) + ", column '" +
                                       schema.y + "': not an integer: '" +
                                       fields[static_cast<std::size_t>(col_y)] + "'");
    }
    if (!parse_double(fields[static_cast<std::size_t>(col_value)], s.value)) {
      throw Error("csv-malformed", "line " + std::to_string(line_no) + ", column '" +
                                       schema.value + "': not a number: '" +
                                       fields[static_cast<std::size_t>(col_value)] + "'");
    }
    if (col_valid >= 0) {
      if (!parse_bool(fields[static_cast<std::size_t>(col_valid)], s.valid)) {
        throw Error("csv-malformed", "line " + std::to_string(line_no) + ", column '" +
                                         schema.valid + "': not a 0/1/true/false flag: '" +
                                         fields[static_cast<std::size_t>(col_valid)] + "'");
      }
    }
    if (s.valid && !std::isfinite(s.value)) {
      throw Error("csv-malformed", "line " + std::to_string(line_no) + ", column '" +
                                       schema.value + "': non-finite value");
    }
    samples.push_back(s);
  }

  return Dataset::from_samples(std::move(samples), std::move(meta));
}

Dataset parse_csv_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw Error("io", "cannot open '" + path + "' for reading");
  }
  DatasetMeta meta;
  meta.source = std::filesystem::path(path).stem().string();
  return parse_csv(in, schema, std::move(meta));
}

void write_csv(const Dataset& d, std::ostream& out) {
  if (!d.meta().source.empty()) out << "# source=" << d.meta().source << "\n";
  if (!d.meta().measurement.empty()) out << "# measurement=" << d.meta().measurement << "\n";
  if (!d.meta().unit.empty()) out << "# unit=" << d.meta().unit << "\n";

  const bool any_invalid = std::any_of(d.samples().begin(), d.samples().end(),
                                       [](const SpatialSample& s) { return !s.valid; });
  out << (any_invalid ? "x,y,value,valid\n" : "x,y,value\n");
  char buf[64];
  for (const SpatialSample& s : d.samples()) {
    format_value(buf, sizeof buf, s.value);
    out << s.x << ',' << s.y << ',' << buf;
    if (any_invalid) out << ',' << (s.valid ? 1 : 0);
    out << '\n';
  }
}

void write_csv_file(const Dataset& d, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) {
      throw Error("io", "cannot open '" + tmp.string() + "' for writing");
    }
    write_csv(d, out);
  }
  fs::rename(tmp, target);
}

Dataset filter_faulty(const Dataset& d) {
  std::vector<SpatialSample> kept;
  kept.reserve(d.samples().size());
  for (const SpatialSample& s : d.samples()) {
    if (s.valid) kept.push_back(s);
  }
  if (kept.size() < 2) {
    throw Error("too-few-samples", "fewer than 2 valid samples remain after filtering (" +
                                       std::to_string(kept.size()) + ")");
  }
  return Dataset::from_samples(std::move(kept), d.meta());
}

NormParams compute_norm_params(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const Eigen::Index n = values.size();
  if (n < 2) {
    throw Error("too-few-samples", "need at least 2 values to standardize");
  }
  const double mean = values.mean();
  const double var = (values.array() - mean).square().sum() / static_cast<double>(n);
  const double std_dev = std::sqrt(var);
  if (!(std_dev > 0.0) || !std::isfinite(std_dev)) {
    throw Error("zero-variance", "values have zero variance; nothing to standardize");
  }
  return NormParams{mean, std_dev};
}

std::pair<Dataset, NormParams> normalize_values(const Dataset& d) {
  const NormParams np = compute_norm_params(d.values());
  std::vector<SpatialSample> samples = d.samples();
  for (SpatialSample& s : samples) {
    s.value = np.normalize(s.value);
  }
  return {Dataset::from_samples(std::move(samples), d.meta(), d.bounds()), np};
}

}  // namespace wafergp
