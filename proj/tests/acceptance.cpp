// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit when
// anything fails. Runs the full-scale experiments, so it is slower than the
// unit suite; budgets are asserted where the contract names one.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wafergp/dataset.hpp"
#include "wafergp/error.hpp"
#include "wafergp/eval.hpp"
#include "wafergp/gpr.hpp"
#include "wafergp/rng.hpp"
#include "wafergp/sampling.hpp"
#include "wafergp/synth.hpp"

using namespace wafergp;

namespace {

// Frozen tolerances and budgets. These are the contract; loosening them is a
// reportable change, not a tweak.
constexpr double kInterpTol = 1e-6;         // |pred - value| at train points
constexpr double kInterpBudgetSec = 5.0;
constexpr double kGradTol = 1e-4;           // relative, against central FD
constexpr double kRmsdTol = 1e-12;
constexpr double kImprovementTol = 1e-9;
constexpr double kOrderingBudgetSec = 1800.0;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s - %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// Distinct points with spacing >= 2, so the kernel matrix stays well
// conditioned at near-zero noise.
Eigen::MatrixX2d spaced_points(int count, Rng& rng) {
  const std::vector<int> cells = rng.sample_without_replacement(16 * 16, count);
  Eigen::MatrixX2d pts(count, 2);
  for (int i = 0; i < count; ++i) {
    pts(i, 0) = 2.0 * (cells[static_cast<std::size_t>(i)] % 16);
    pts(i, 1) = 2.0 * (cells[static_cast<std::size_t>(i)] / 16);
  }
  return pts;
}

// criterion 1: near-interpolation at sigma_n^2 = 1e-10
void check_interpolation() {
  const double t0 = now_seconds();
  double worst = 0.0;
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixX2d pts = spaced_points(50, rng);
    Eigen::VectorXd v(50);
    for (int i = 0; i < 50; ++i) v[i] = rng.normal();
    Hyperparams<double> hp;
    hp.length_scale = 1.0 + rng.uniform01();
    hp.signal_variance = 1.0;
    hp.noise_variance = 1e-10;
    const Model<double> model = make_model(pts, v, hp);
    const Eigen::VectorXd pred = predict_mean(model, pts);
    worst = std::max(worst, (pred - v).cwiseAbs().maxCoeff());
  }
  const double elapsed = now_seconds() - t0;
  const bool pass = worst < kInterpTol && elapsed < kInterpBudgetSec;
  report(1, pass,
         fmt("train-point reproduction: max |pred - value| = %.3g (tol %.0e), %d problems in %.2f s (budget %.0f s)",
             worst, kInterpTol, 20, elapsed, kInterpBudgetSec));
}

// criterion 2: analytic gradient vs central finite differences
void check_gradients() {
  Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::pair<int, int>> seen;
    Eigen::MatrixX2d pts(20, 2);
    int filled = 0;
    while (filled < 20) {
      const int x = static_cast<int>(rng.below(12));
      const int y = static_cast<int>(rng.below(12));
      if (!seen.insert({x, y}).second) continue;
      pts(filled, 0) = x;
      pts(filled, 1) = y;
      ++filled;
    }
    Eigen::VectorXd v(20);
    for (int i = 0; i < 20; ++i) v[i] = rng.normal();

    Hyperparams<double> hp;
    hp.length_scale = 1.0 + 5.0 * rng.uniform01();
    hp.signal_variance = 0.5 + 1.5 * rng.uniform01();
    hp.noise_variance = 1e-4 + 0.1 * rng.uniform01();

    const Eigen::MatrixXd d2 = squared_distance_matrix(pts);
    const LmlResult<double> res = log_marginal_likelihood_from_distances(d2, v, hp);

    Eigen::Vector3d fd;
    const double h = 1e-5;
    const Eigen::Vector3d theta(std::log(hp.length_scale), std::log(hp.signal_variance),
                                std::log(hp.noise_variance));
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d up = theta, dn = theta;
      up[k] += h;
      dn[k] -= h;
      const Hyperparams<double> hp_up{std::exp(up[0]), std::exp(up[1]), std::exp(up[2])};
      const Hyperparams<double> hp_dn{std::exp(dn[0]), std::exp(dn[1]), std::exp(dn[2])};
      const double f_up =
          log_marginal_likelihood_from_distances(d2, v, hp_up, 1e-10, false).value;
      const double f_dn =
          log_marginal_likelihood_from_distances(d2, v, hp_dn, 1e-10, false).value;
      fd[k] = (f_up - f_dn) / (2.0 * h);
    }
    const double err = (res.grad_log - fd).norm() / std::max(1.0, fd.norm());
    worst = std::max(worst, err);
  }
  report(2, worst < kGradTol,
         fmt("lml gradient vs central differences: worst relative error %.3g (tol %.0e) over 50 instances",
             worst, kGradTol));
}

// criterion 3: rmsd against an independent loop
void check_rmsd_oracle() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(200));
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = 10.0 * rng.normal();
      b[i] = 10.0 * rng.normal();
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    const double oracle = std::sqrt(acc / n);
    worst = std::max(worst, std::abs(rmsd(a, b) - oracle) / std::max(1.0, oracle));
  }

  // pred-vs-truth form on an actual evaluation
  WaferSynthConfig synth_cfg;
  synth_cfg.approx_devices = 300;
  synth_cfg.seed = 9;
  const Dataset d = gen_wafer(synth_cfg);
  PipelineConfig cfg;
  cfg.sampling.seed = 5;
  const SamplingPlan plan = sample(d, Method::random, cfg.sampling, cfg.thresholds);
  const PlanEvaluation ev = evaluate_plan(d, plan, cfg.fit);
  Eigen::VectorXd truth(static_cast<Eigen::Index>(plan.test.size()));
  for (std::size_t i = 0; i < plan.test.size(); ++i) {
    truth[static_cast<Eigen::Index>(i)] =
        d.samples()[static_cast<std::size_t>(plan.test[i])].value;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const double r = ev.predictions_raw[i] - truth[i];
    acc += r * r;
  }
  const double oracle = std::sqrt(acc / static_cast<double>(truth.size()));
  worst = std::max(worst, std::abs(ev.rmsd_raw - oracle) / std::max(1.0, oracle));

  report(3, worst < kRmsdTol,
         fmt("rmsd vs brute-force loop: worst relative deviation %.3g (tol %.0e), 100 vectors plus one prediction run",
             worst, kRmsdTol));
}

// criterion 4: predicate scan over random SDE-family configurations
void check_sde_predicate_suite() {
  Rng rng(404);
  int plans = 0;
  int violations = 0;
  int size_misses = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 8 + static_cast<int>(rng.below(13));
    const int h = 8 + static_cast<int>(rng.below(13));
    std::vector<SpatialSample> samples;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        samples.push_back({x, y, rng.normal(), true});
      }
    }
    const Dataset d = Dataset::from_samples(std::move(samples), {});

    SamplingConfig cfg;
    cfg.p = 0.05 + 0.25 * rng.uniform01();
    cfg.seed = derive_seed(404, static_cast<std::uint64_t>(trial));
    cfg.strata_count = 2 + static_cast<int>(rng.below(7));
    cfg.cluster_count = 2 + static_cast<int>(rng.below(7));
    SdeThresholds t;
    do {
      t.alpha = static_cast<int>(rng.below(5));
      t.beta = static_cast<int>(rng.below(5));
    } while (!t.valid());

    const Method methods[] = {Method::sde, Method::s_sde, Method::k_sde};
    const Method m = methods[rng.below(3)];
    const SamplingPlan plan = sample(d, m, cfg, t);
    ++plans;

    if (static_cast<int>(plan.train.size()) != train_target(cfg.p, d.size())) ++size_misses;

    // primary picks of one SDE call share a group id; scan each group
    std::map<int, std::vector<int>> primary_by_group;
    for (std::size_t i = 0; i < plan.train.size(); ++i) {
      if (plan.provenance[i] == Provenance::primary) {
        primary_by_group[plan.group[i]].push_back(plan.train[i]);
      }
    }
    for (const auto& [group, members] : primary_by_group) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          const SpatialSample& a = d.samples()[static_cast<std::size_t>(members[i])];
          const SpatialSample& b = d.samples()[static_cast<std::size_t>(members[j])];
          if (!sde_predicate(a.x, a.y, b.x, b.y, t)) ++violations;
        }
      }
    }
  }
  report(4, violations == 0 && size_misses == 0,
         fmt("sde predicate scan: %d plans, %d pairwise violations, %d size-contract misses",
             plans, violations, size_misses));
}

// criterion 5: sweep shape and rerun stability
void check_sweep_shape() {
  WaferSynthConfig synth_cfg;
  synth_cfg.approx_devices = 300;
  synth_cfg.seed = 77;
  const Dataset d = gen_wafer(synth_cfg);
  PipelineConfig cfg;
  cfg.sampling.seed = 11;
  const SweepResult a = sweep_alpha_beta(d, cfg, 1);
  const SweepResult b = sweep_alpha_beta(d, cfg, 1);

  int cells = 0;
  bool origin_absent = std::isnan(a.mean_rmsd[0][0]);
  bool identical = true;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == 0 && j == 0) continue;
      if (std::isfinite(a.mean_rmsd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]))
        ++cells;
      if (a.mean_rmsd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] !=
          b.mean_rmsd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
        identical = false;
    }
  }
  const bool argmin_stable = a.argmin.alpha == b.argmin.alpha && a.argmin.beta == b.argmin.beta;
  const bool argmin_sane =
      a.argmin_value <= a.mean_rmsd[4][4] + 1e-15;  // argmin never beats itself
  const bool pass =
      cells == SweepResult::kCells && origin_absent && identical && argmin_stable && argmin_sane;
  report(5, pass,
         fmt("sweep grid: %d/24 cells filled, origin absent %d, rerun identical %d, argmin (%d,%d) stable %d",
             cells, origin_absent ? 1 : 0, identical ? 1 : 0, a.argmin.alpha, a.argmin.beta,
             argmin_stable ? 1 : 0));
}

// criteria 6 and 9 share this ordering check
struct OrderingOutcome {
  bool random_gt_stratified = false;
  bool random_gt_kmeans = false;
  bool ksde_lt_kmeans = false;
  bool ssde_lt_stratified = false;
  bool ksde_lowest = false;

  bool all() const {
    return random_gt_stratified && random_gt_kmeans && ksde_lt_kmeans && ssde_lt_stratified &&
           ksde_lowest;
  }
};

OrderingOutcome ordering_of(const std::vector<MethodStats>& methods) {
  std::map<std::string, double> mean;
  for (const MethodStats& m : methods) mean[m.method] = m.mean_rmsd_raw;
  OrderingOutcome o;
  o.random_gt_stratified = mean["random"] > mean["stratified"];
  o.random_gt_kmeans = mean["random"] > mean["kmeans"];
  o.ksde_lt_kmeans = mean["k-sde"] < mean["kmeans"];
  o.ssde_lt_stratified = mean["s-sde"] < mean["stratified"];
  o.ksde_lowest = true;
  for (const auto& [name, value] : mean) {
    if (name != "k-sde" && value <= mean["k-sde"]) o.ksde_lowest = false;
  }
  return o;
}

// criterion 6: Random worst, SDE variants beat their plain counterparts,
// K-SDE best overall, on 20 smooth-field wafers
void check_method_ordering() {
  const double t0 = now_seconds();
  std::vector<Dataset> wafers;
  for (int i = 0; i < 20; ++i) {
    WaferSynthConfig synth_cfg;
    synth_cfg.approx_devices = 3000;
    synth_cfg.radial_trend_amplitude = 2.0;
    synth_cfg.field_length_scale = 5.0;
    synth_cfg.field_std = 1.0;
    synth_cfg.noise_std = 0.02;
    synth_cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    char label[32];
    std::snprintf(label, sizeof label, "wafer-%02d", i);
    synth_cfg.source_label = label;
    wafers.push_back(gen_wafer(synth_cfg));
  }

  PipelineConfig cfg;
  cfg.sampling.p = 0.1;
  cfg.sampling.seed = 424242;
  const ExperimentReport report_data = compare_methods(wafers, cfg, 2);
  const OrderingOutcome o = ordering_of(report_data.methods);
  const double elapsed = now_seconds() - t0;

  std::ostringstream means;
  for (const MethodStats& m : report_data.methods) {
    means << ' ' << m.method << '=' << fmt("%.4f", m.mean_rmsd_raw);
  }
  const bool pass = o.all() && elapsed < kOrderingBudgetSec;
  report(6, pass,
         fmt("wafer ordering over 20 seeds:%s; rnd>strat %d, rnd>km %d, ksde<km %d, ssde<strat %d, ksde lowest %d; %.0f s (budget %.0f s)",
             means.str().c_str(), o.random_gt_stratified, o.random_gt_kmeans, o.ksde_lt_kmeans,
             o.ssde_lt_stratified, o.ksde_lowest, elapsed, kOrderingBudgetSec));
}

// criterion 7: improvement arithmetic against hand results
void check_improvement_arithmetic() {
  const double wafer_family = improvement_pct(0.041, 0.035);
  const double fpga_family = improvement_pct(0.050, 0.042);
  const bool pass = std::abs(wafer_family - 14.634146341463415) < kImprovementTol &&
                    std::abs(fpga_family - 16.0) < kImprovementTol;
  report(7, pass,
         fmt("improvement arithmetic: (0.041 -> 0.035) = %.6f%%, (0.050 -> 0.042) = %.6f%% (tol %.0e)",
             wafer_family, fpga_family, kImprovementTol));
}

// criterion 8: byte-identical reports from two identical compare runs
void check_determinism() {
  std::vector<Dataset> wafers;
  for (int i = 0; i < 2; ++i) {
    WaferSynthConfig synth_cfg;
    synth_cfg.approx_devices = 600;
    synth_cfg.seed = 3000 + static_cast<std::uint64_t>(i);
    char label[32];
    std::snprintf(label, sizeof label, "wafer-%02d", i);
    synth_cfg.source_label = label;
    wafers.push_back(gen_wafer(synth_cfg));
  }
  PipelineConfig cfg;
  cfg.sampling.seed = 99;

  auto render = [&]() {
    const ExperimentReport r = compare_methods(wafers, cfg, 2);
    std::ostringstream out;
    write_runs_csv(r, out);
    write_methods_csv(r, out);
    write_groups_csv(r, out);
    write_improvements_csv(r, out);
    return out.str();
  };
  const std::string first = render();
  const std::string second = render();
  report(8, first == second,
         fmt("two full compare runs byte-compare %s over %zu report bytes",
             first == second ? "identical" : "DIFFERENT", first.size()));
}

// criterion 9: FPGA-shaped generator plus per-device ordering
void check_fpga_experiment() {
  // full-scale shape contract
  FpgaSynthConfig full;
  full.seed = 4000;
  const std::vector<Dataset> paths = gen_fpga(full);
  bool shape_ok = paths.size() == 32;
  for (const Dataset& d : paths) {
    shape_ok = shape_ok && d.size() == 3173 && d.grid_width() == 33 && d.grid_height() == 120;
  }

  // Per-device ordering on reduced devices: all five devices share the
  // fabric-family map (field_std = 0 keeps the die signature identical, the
  // way one floorplan repeats across a production run), differ in occupancy,
  // per-path offsets and noise, and are measured over the full 32 paths once
  // each so per-device means rest on 32 sampling draws.
  int devices_ok = 0;
  const int device_count = 5;
  for (int dev = 0; dev < device_count; ++dev) {
    FpgaSynthConfig synth_cfg;
    synth_cfg.n_points = 1500;
    synth_cfg.n_paths = 32;
    synth_cfg.field_length_scale = 6.0;
    synth_cfg.field_std = 0.0;
    synth_cfg.family_field_std = 1.0;
    synth_cfg.family_length_scale = 6.0;
    synth_cfg.row_gradient = 0.017;
    synth_cfg.path_offset_std = 0.5;
    synth_cfg.noise_std = 0.02;
    synth_cfg.seed = 5000 + static_cast<std::uint64_t>(dev);
    char label[32];
    std::snprintf(label, sizeof label, "fpga-%02d", dev);
    synth_cfg.source_label = label;
    const std::vector<Dataset> device_paths = gen_fpga(synth_cfg);

    PipelineConfig cfg;
    cfg.sampling.p = 0.1;
    cfg.sampling.seed = 7000 + static_cast<std::uint64_t>(dev);
    const ExperimentReport r = compare_methods(device_paths, cfg, 1);
    if (ordering_of(r.methods).all()) ++devices_ok;
  }
  const bool pass = shape_ok && devices_ok == device_count;
  report(9, pass,
         fmt("fpga shape 32x3173 on 33x120 grid %s; per-device ordering holds on %d/%d devices",
             shape_ok ? "ok" : "WRONG", devices_ok, device_count));
}

}  // namespace

int main() {
  try {
    check_interpolation();
    check_gradients();
    check_rmsd_oracle();
    check_sde_predicate_suite();
    check_sweep_shape();
    check_method_ordering();
    check_improvement_arithmetic();
    check_determinism();
    check_fpga_experiment();
  } catch (const Error& e) {
    std::printf("acceptance aborted: %s: %s\n", e.code().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d/9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
