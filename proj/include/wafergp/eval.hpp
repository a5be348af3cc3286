#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wafergp/dataset.hpp"
#include "wafergp/gpr.hpp"
#include "wafergp/sampling.hpp"

namespace wafergp {

/// sqrt(mean((pred - truth)^2)). Inputs must have equal nonzero length.
double rmsd(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

/// (baseline - improved) / baseline * 100. baseline must be nonzero.
double improvement_pct(double baseline, double improved);

/// Everything one experiment run needs besides the per-run seed.
struct PipelineConfig {
  SamplingConfig sampling;
  SdeThresholds thresholds;
  FitConfig<double> fit;
};

/// Outcome of scoring one dataset with one sampling plan.
struct PlanEvaluation {
  Eigen::VectorXd predictions_raw;  ///< parallel to plan.test, measurement units
  double rmsd_raw = 0.0;
  double rmsd_normalized = 0.0;
  Hyperparams<double> hyperparams;  ///< fitted on the normalized train values
  NormParams norm;
  double log_marginal = 0.0;
};

/// Normalizes with train-only statistics, fits GPR on the train split and
/// scores predictions over the test split.
PlanEvaluation evaluate_plan(const Dataset& d, const SamplingPlan& plan,
                             const FitConfig<double>& fit_cfg);

struct RunResult {
  std::string dataset_id;
  std::string method;
  std::uint64_t seed = 0;
  double rmsd_raw = 0.0;
  double rmsd_normalized = 0.0;
  int train_size = 0;
  Hyperparams<double> hyperparams;
  double wall_seconds = 0.0;  ///< measured; excluded from serialized reports
};

/// Full pipeline: sample with `method` under `seed`, fit, predict, score.
RunResult run_pipeline(const Dataset& d, Method method, const PipelineConfig& cfg,
                       std::uint64_t seed);

/// Mean RMSD over the 24-cell (alpha, beta) grid; (0,0) is absent.
struct SweepResult {
  std::array<std::array<double, 5>, 5> mean_rmsd{};  ///< [alpha][beta]; (0,0) unset
  int reps = 0;
  SdeThresholds argmin;
  double argmin_value = 0.0;

  static constexpr int kCells = 24;
};

/// Runs SDE-only sampling at every (alpha, beta) in {0..4}^2 \ {(0,0)},
/// reps runs per cell with seeds cfg.sampling.seed + 0..reps-1.
SweepResult sweep_alpha_beta(const Dataset& d, const PipelineConfig& cfg, int reps);

struct MethodStats {
  std::string method;
  double mean_rmsd_raw = 0.0;
  double mean_rmsd_normalized = 0.0;
  int runs = 0;
};

struct GroupStats {
  std::string group;  ///< dataset source prefix before '/'
  std::string method;
  double mean_rmsd_raw = 0.0;
  double mean_rmsd_normalized = 0.0;
  int runs = 0;
};

struct ExperimentReport {
  std::vector<RunResult> runs;      ///< (dataset, method, rep) in execution order
  std::vector<MethodStats> methods; ///< one row per comparison method
  std::vector<GroupStats> groups;   ///< per (group, method), group-major
  double improvement_ksde_vs_kmeans = 0.0;       ///< from family means (raw)
  double improvement_ssde_vs_stratified = 0.0;
  double mean_group_improvement_ksde_vs_kmeans = 0.0;
  double mean_group_improvement_ssde_vs_stratified = 0.0;
  int reps = 0;
};

/// Dataset grouping key: source up to the first '/', or the whole source.
std::string dataset_group(const Dataset& d);

/// Runs the five comparison methods over every dataset and rep; run seed for
/// (dataset i, rep r) is derive_seed(derive_seed(cfg.sampling.seed, i), r).
ExperimentReport compare_methods(const std::vector<Dataset>& datasets,
                                 const PipelineConfig& cfg, int reps);

/// CSV emitters (no timing columns; reports byte-compare across reruns).
void write_sweep_csv(const SweepResult& r, std::ostream& out);
void write_methods_csv(const ExperimentReport& r, std::ostream& out);
void write_groups_csv(const ExperimentReport& r, std::ostream& out);
void write_runs_csv(const ExperimentReport& r, std::ostream& out);
void write_improvements_csv(const ExperimentReport& r, std::ostream& out);

/// Human-readable method table for terminal output.
void print_report(const ExperimentReport& r, std::ostream& out);

}  // namespace wafergp
