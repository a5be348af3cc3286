#include "wafergp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "wafergp/error.hpp"
#include "wafergp/rng.hpp"

namespace wafergp {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double rmsd(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() == 0) {
    throw Error("empty-input", "rmsd needs at least one element");
  }
  if (pred.size() != truth.size()) {
    throw Error("length-mismatch",
                "rmsd inputs have sizes " + std::to_string(pred.size()) + " and " +
                    std::to_string(truth.size()));
  }
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

double improvement_pct(double baseline, double improved) {
  if (baseline == 0.0) {
    throw Error("invalid-argument", "improvement baseline must be nonzero");
  }
  return (baseline - improved) / baseline * 100.0;
}

PlanEvaluation evaluate_plan(const Dataset& d, const SamplingPlan& plan,
                             const FitConfig<double>& fit_cfg) {
  check_plan(plan, d.size());
  const int m = static_cast<int>(plan.train.size());
  const int q = static_cast<int>(plan.test.size());
  if (q == 0) {
    throw Error("empty-input", "plan has no test points to score");
  }

  Eigen::MatrixX2d train_pts(m, 2);
  Eigen::VectorXd train_vals(m);
  for (int i = 0; i < m; ++i) {
    const SpatialSample& s = d.samples()[static_cast<std::size_t>(plan.train[static_cast<std::size_t>(i)])];
    train_pts(i, 0) = s.x;
    train_pts(i, 1) = s.y;
    train_vals(i) = s.value;
  }
  Eigen::MatrixX2d test_pts(q, 2);
  Eigen::VectorXd test_vals(q);
  for (int i = 0; i < q; ++i) {
    const SpatialSample& s = d.samples()[static_cast<std::size_t>(plan.test[static_cast<std::size_t>(i)])];
    test_pts(i, 0) = s.x;
    test_pts(i, 1) = s.y;
    test_vals(i) = s.value;
  }

  // Normalization statistics come from the train split alone.
  const NormParams norm = compute_norm_params(train_vals);
  Eigen::VectorXd train_norm(m);
  for (int i = 0; i < m; ++i) train_norm(i) = norm.normalize(train_vals(i));

  PlanEvaluation ev;
  ev.norm = norm;
  const Model<double> model = fit(train_pts, train_norm, fit_cfg);
  ev.hyperparams = model.hyperparams;
  ev.log_marginal = model.log_marginal;

  const Eigen::VectorXd pred_norm = predict_mean(model, test_pts);
  ev.predictions_raw.resize(q);
  for (int i = 0; i < q; ++i) ev.predictions_raw(i) = norm.denormalize(pred_norm(i));

  Eigen::VectorXd test_norm(q);
  for (int i = 0; i < q; ++i) test_norm(i) = norm.normalize(test_vals(i));
  ev.rmsd_normalized = rmsd(pred_norm, test_norm);
  ev.rmsd_raw = rmsd(ev.predictions_raw, test_vals);
  return ev;
}

RunResult run_pipeline(const Dataset& d, Method method, const PipelineConfig& cfg,
                       std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();

  SamplingConfig s_cfg = cfg.sampling;
  s_cfg.seed = seed;
  const SamplingPlan plan = sample(d, method, s_cfg, cfg.thresholds);
  const PlanEvaluation ev = evaluate_plan(d, plan, cfg.fit);

  RunResult r;
  r.dataset_id = d.meta().source;
  r.method = method_name(method);
  r.seed = seed;
  r.rmsd_raw = ev.rmsd_raw;
  r.rmsd_normalized = ev.rmsd_normalized;
  r.train_size = static_cast<int>(plan.train.size());
  r.hyperparams = ev.hyperparams;
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SweepResult sweep_alpha_beta(const Dataset& d, const PipelineConfig& cfg, int reps) {
  if (reps < 1) {
    throw Error("invalid-config", "sweep repetition count must be >= 1");
  }

  SweepResult res;
  res.reps = reps;
  for (auto& row : res.mean_rmsd) row.fill(std::numeric_limits<double>::quiet_NaN());

  double best = std::numeric_limits<double>::infinity();
  for (int alpha = 0; alpha <= 4; ++alpha) {
    for (int beta = 0; beta <= 4; ++beta) {
      if (alpha == 0 && beta == 0) continue;
      PipelineConfig cell = cfg;
      cell.thresholds = SdeThresholds{alpha, beta};
      double sum = 0.0;
      for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed = cfg.sampling.seed + static_cast<std::uint64_t>(r);
        sum += run_pipeline(d, Method::sde, cell, seed).rmsd_raw;
      }
      const double mean = sum / static_cast<double>(reps);
      res.mean_rmsd[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)] = mean;
      if (mean < best) {  // strict: ties keep the lexicographically first cell
        best = mean;
        res.argmin = SdeThresholds{alpha, beta};
        res.argmin_value = mean;
      }
    }
  }
  return res;
}

std::string dataset_group(const Dataset& d) {
  const std::string& s = d.meta().source;
  const auto slash = s.find('/');
  return slash == std::string::npos ? s : s.substr(0, slash);
}

ExperimentReport compare_methods(const std::vector<Dataset>& datasets,
                                 const PipelineConfig& cfg, int reps) {
  if (datasets.empty()) {
    throw Error("empty-input", "compare needs at least one dataset");
  }
  if (reps < 1) {
    throw Error("invalid-config", "repetition count must be >= 1");
  }

  ExperimentReport rep;
  rep.reps = reps;
  const std::vector<Method>& methods = comparison_methods();

  struct Sum {
    double raw = 0.0;
    double norm = 0.0;
    int n = 0;
  };
  std::map<std::string, Sum> by_method;
  std::vector<std::string> group_order;
  std::map<std::string, std::map<std::string, Sum>> by_group;

  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const Dataset& d = datasets[i];
    const std::string group = dataset_group(d);
    if (by_group.find(group) == by_group.end()) group_order.push_back(group);
    for (Method m : methods) {
      for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed =
            derive_seed(derive_seed(cfg.sampling.seed, static_cast<std::uint64_t>(i)),
                        static_cast<std::uint64_t>(r));
        RunResult run = run_pipeline(d, m, cfg, seed);
        Sum& ms = by_method[run.method];
        ms.raw += run.rmsd_raw;
        ms.norm += run.rmsd_normalized;
        ++ms.n;
        Sum& gs = by_group[group][run.method];
        gs.raw += run.rmsd_raw;
        gs.norm += run.rmsd_normalized;
        ++gs.n;
        rep.runs.push_back(std::move(run));
      }
    }
  }

  for (Method m : methods) {
    const Sum& s = by_method[method_name(m)];
    MethodStats stats;
    stats.method = method_name(m);
    stats.mean_rmsd_raw = s.raw / s.n;
    stats.mean_rmsd_normalized = s.norm / s.n;
    stats.runs = s.n;
    rep.methods.push_back(std::move(stats));
  }
  for (const std::string& g : group_order) {
    for (Method m : methods) {
      const Sum& s = by_group[g][method_name(m)];
      GroupStats stats;
      stats.group = g;
      stats.method = method_name(m);
      stats.mean_rmsd_raw = s.raw / s.n;
      stats.mean_rmsd_normalized = s.norm / s.n;
      stats.runs = s.n;
      rep.groups.push_back(std::move(stats));
    }
  }

  auto family_mean = [&](const char* name) {
    for (const MethodStats& s : rep.methods) {
      if (s.method == name) return s.mean_rmsd_raw;
    }
    throw Error("internal", std::string("missing method stats for ") + name);
  };
  rep.improvement_ksde_vs_kmeans =
      improvement_pct(family_mean("kmeans"), family_mean("k-sde"));
  rep.improvement_ssde_vs_stratified =
      improvement_pct(family_mean("stratified"), family_mean("s-sde"));

  auto group_mean = [&](const std::string& g, const char* name) {
    const Sum& s = by_group[g][name];
    return s.raw / s.n;
  };
  double acc_k = 0.0;
  double acc_s = 0.0;
  for (const std::string& g : group_order) {
    acc_k += improvement_pct(group_mean(g, "kmeans"), group_mean(g, "k-sde"));
    acc_s += improvement_pct(group_mean(g, "stratified"), group_mean(g, "s-sde"));
  }
  rep.mean_group_improvement_ksde_vs_kmeans = acc_k / static_cast<double>(group_order.size());
  rep.mean_group_improvement_ssde_vs_stratified = acc_s / static_cast<double>(group_order.size());
  return rep;
}

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
  out << "# mean rmsd_raw per (alpha,beta) over " << r.reps << " rep(s)\n";
  out << "alpha_beta,0,1,2,3,4\n";
  for (int alpha = 0; alpha <= 4; ++alpha) {
    out << alpha;
    for (int beta = 0; beta <= 4; ++beta) {
      out << ',';
      if (alpha == 0 && beta == 0) {
        out << '-';
      } else {
        out << g17(r.mean_rmsd[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)]);
      }
    }
    out << '\n';
  }
  out << "# argmin_alpha=" << r.argmin.alpha << '\n';
  out << "# argmin_beta=" << r.argmin.beta << '\n';
  out << "# argmin_value=" << g17(r.argmin_value) << '\n';
}

void write_methods_csv(const ExperimentReport& r, std::ostream& out) {
  out << "method,mean_rmsd_raw,mean_rmsd_normalized,runs\n";
  for (const MethodStats& s : r.methods) {
    out << s.method << ',' << g17(s.mean_rmsd_raw) << ',' << g17(s.mean_rmsd_normalized)
        << ',' << s.runs << '\n';
  }
}

void write_groups_csv(const ExperimentReport& r, std::ostream& out) {
  out << "group,method,mean_rmsd_raw,mean_rmsd_normalized,runs\n";
  for (const GroupStats& s : r.groups) {
    out << s.group << ',' << s.method << ',' << g17(s.mean_rmsd_raw) << ','
        << g17(s.mean_rmsd_normalized) << ',' << s.runs << '\n';
  }
}

void write_runs_csv(const ExperimentReport& r, std::ostream& out) {
  out << "dataset,method,seed,train_size,rmsd_raw,rmsd_normalized,"
         "length_scale,signal_variance,noise_variance\n";
  for (const RunResult& run : r.runs) {
    out << run.dataset_id << ',' << run.method << ',' << run.seed << ',' << run.train_size
        << ',' << g17(run.rmsd_raw) << ',' << g17(run.rmsd_normalized) << ','
        << g17(run.hyperparams.length_scale) << ',' << g17(run.hyperparams.signal_variance)
        << ',' << g17(run.hyperparams.noise_variance) << '\n';
  }
}

void write_improvements_csv(const ExperimentReport& r, std::ostream& out) {
  auto mean_of = [&](const char* name) {
    for (const MethodStats& s : r.methods) {
      if (s.method == name) return s.mean_rmsd_raw;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  out << "scope,baseline,improved,baseline_mean_rmsd_raw,improved_mean_rmsd_raw,"
         "improvement_pct\n";
  out << "family,kmeans,k-sde," << g17(mean_of("kmeans")) << ',' << g17(mean_of("k-sde"))
      << ',' << g17(r.improvement_ksde_vs_kmeans) << '\n';
  out << "family,stratified,s-sde," << g17(mean_of("stratified")) << ','
      << g17(mean_of("s-sde")) << ',' << g17(r.improvement_ssde_vs_stratified) << '\n';
  out << "group-mean,kmeans,k-sde,,," << g17(r.mean_group_improvement_ksde_vs_kmeans) << '\n';
  out << "group-mean,stratified,s-sde,,," << g17(r.mean_group_improvement_ssde_vs_stratified)
      << '\n';
}

void print_report(const ExperimentReport& r, std::ostream& out) {
  out << "method        mean rmsd (raw)   mean rmsd (norm)   runs\n";
  for (const MethodStats& s : r.methods) {
    char line[128];
    std::snprintf(line, sizeof line, "%-12s  %-16s  %-17s  %d\n", s.method.c_str(),
                  g6(s.mean_rmsd_raw).c_str(), g6(s.mean_rmsd_normalized).c_str(), s.runs);
    out << line;
  }
  out << "improvement k-sde vs kmeans:      " << g6(r.improvement_ksde_vs_kmeans) << "%\n";
  out << "improvement s-sde vs stratified:  " << g6(r.improvement_ssde_vs_stratified)
      << "%\n";
  out << "per-group mean improvement (k-sde vs kmeans):     "
      << g6(r.mean_group_improvement_ksde_vs_kmeans) << "%\n";
  out << "per-group mean improvement (s-sde vs stratified): "
      << g6(r.mean_group_improvement_ssde_vs_stratified) << "%\n";
}

}  // namespace wafergp
