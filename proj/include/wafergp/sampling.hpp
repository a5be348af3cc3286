#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wafergp/dataset.hpp"

namespace wafergp {

/// Training-set selection strategy. The pure SDE variant exists alongside
/// the five comparison methods; the threshold sweep uses it directly.
enum class Method { random, stratified, kmeans, sde, s_sde, k_sde };

Method parse_method(const std::string& name);
std::string method_name(Method m);
/// The five methods compared in reports (everything except pure SDE).
const std::vector<Method>& comparison_methods();

struct SamplingConfig {
  double p = 0.1;             ///< training fraction
  std::uint64_t seed = 0;
  int strata_count = 7;       ///< S, for stratified and S-SDE
  int cluster_count = 7;      ///< k, for k-means and K-SDE
};

/// Axis-wise elimination thresholds. A candidate is kept only when both
/// |dx| >= alpha and |dy| >= beta hold against every accepted point.
struct SdeThresholds {
  int alpha = 2;
  int beta = 2;

  bool valid() const { return alpha >= 0 && beta >= 0 && (alpha > 0 || beta > 0); }
};

enum class Provenance : std::uint8_t { primary, backfill };

/// Disjoint train/test split with per-pick provenance. `train` is in
/// selection order; `provenance` and `group` run parallel to it (`group`
/// is the stratum or cluster id, -1 when the method has no grouping).
/// `test` holds the complement in ascending index order.
struct SamplingPlan {
  std::vector<int> train;
  std::vector<int> test;
  std::vector<Provenance> provenance;
  std::vector<int> group;
};

/// Exact training size contract: round(p * N), half away from zero.
int train_target(double p, int n);

/// Throws unless the plan partitions 0..n-1 exactly and the parallel
/// arrays are consistent.
void check_plan(const SamplingPlan& plan, int n);

void write_plan_csv(const SamplingPlan& plan, const Dataset& d, std::ostream& out);
void write_plan_csv_file(const SamplingPlan& plan, const Dataset& d, const std::string& path);
/// Reads a plan back; validates indices against `n` (dataset size).
SamplingPlan read_plan_csv(std::istream& in, int n);
SamplingPlan read_plan_csv_file(const std::string& path, int n);

/// Value-quantile strata. Ties are broken by (value, index) rank, so the
/// strata sizes always differ by at most one regardless of duplicates.
struct StratumSpec {
  std::vector<double> boundaries;             ///< strictly ascending, merged
  std::vector<std::vector<int>> strata;       ///< per-stratum sample indices
};

StratumSpec make_strata(const Dataset& d, int strata_count);

struct KMeansResult {
  std::vector<int> labels;        ///< per-sample cluster id in [0, k)
  std::vector<double> centroids;  ///< k centroid values
  int iterations = 0;
  double inertia = 0.0;           ///< sum of squared distances to assigned centroid
};

/// Lloyd's algorithm on scalar values with k-means++ seeding. Assignment
/// ties go to the lowest cluster index; an empty cluster is reseeded to the
/// point farthest from its current centroid.
KMeansResult kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed);

/// One SDE pass over a candidate pool: visit the pool in a seeded uniform
/// permutation, keep a candidate iff the threshold predicate holds against
/// every point kept so far, then top the selection up from the discarded
/// points until `target_count` is reached.
struct SdeSelection {
  std::vector<int> selected;  ///< pool positions, phase-1 picks first
  std::vector<Provenance> provenance;
};

bool sde_predicate(int ax, int ay, int bx, int by, const SdeThresholds& t);

SdeSelection sde_select(const std::vector<SpatialSample>& pool, int target_count,
                        const SdeThresholds& t, std::uint64_t seed);

SamplingPlan random_sampling(const Dataset& d, const SamplingConfig& cfg);
SamplingPlan stratified_sampling(const Dataset& d, const SamplingConfig& cfg);
SamplingPlan kmeans_sampling(const Dataset& d, const SamplingConfig& cfg);
SamplingPlan sde_sampling(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t);
SamplingPlan s_sde(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t);
SamplingPlan k_sde(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t);

/// Uniform dispatch for the pipeline and CLI.
SamplingPlan sample(const Dataset& d, Method method, const SamplingConfig& cfg,
                    const SdeThresholds& t);

}  // namespace wafergp
