#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wafergp/dataset.hpp"
#include "wafergp/error.hpp"
#include "wafergp/eval.hpp"
#include "wafergp/heatmap.hpp"
#include "wafergp/manifest.hpp"
#include "wafergp/sampling.hpp"
#include "wafergp/synth.hpp"
#include "wafergp/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wafergp;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("io", "cannot open '" + tmp.string() + "' for writing");
    out << content;
  }
  fs::rename(tmp, target);
}

/// Seed policy: explicit --seed wins; otherwise --strict is an error and
/// non-strict runs draw one from entropy (recorded in the manifest).
std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed, bool strict) {
  if (seed_given) return seed;
  if (strict) {
    throw Error("strict-seed", "--strict requires an explicit --seed");
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Canonical argv recorder: every flag materialized so a replay reruns the
/// exact configuration.
class ArgvBuilder {
 public:
  explicit ArgvBuilder(const std::string& command) { tokens_.push_back(command); }
  ArgvBuilder& sub(const std::string& name) {
    tokens_.push_back(name);
    return *this;
  }
  ArgvBuilder& flag(const std::string& name, const std::string& value) {
    tokens_.push_back(name);
    tokens_.push_back(value);
    return *this;
  }
  ArgvBuilder& flag(const std::string& name, std::uint64_t v) {
    return flag(name, std::to_string(v));
  }
  ArgvBuilder& flag(const std::string& name, int v) { return flag(name, std::to_string(v)); }
  ArgvBuilder& flag(const std::string& name, double v) { return flag(name, g17(v)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
};

Manifest base_manifest(const std::string& command, const ArgvBuilder& argv) {
  Manifest m;
  m.set("version", kVersion);
  m.set("command", command);
  for (std::size_t i = 0; i < argv.tokens().size(); ++i) {
    m.set("argv." + std::to_string(i), argv.tokens()[i]);
  }
  return m;
}

int dispatch(const std::vector<std::string>& args);

// ---------------------------------------------------------------- synth ----

struct SynthWaferOpts {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  WaferSynthConfig cfg;
  std::string out;
};

void run_synth_wafer(SynthWaferOpts& o) {
  o.cfg.seed = resolve_seed(o.seed_given, o.seed, o.strict);
  const Dataset d = gen_wafer(o.cfg);
  write_csv_file(d, o.out);

  ArgvBuilder argv("synth");
  argv.sub("wafer")
      .flag("--seed", o.cfg.seed)
      .flag("--devices", o.cfg.approx_devices)
      .flag("--trend-amplitude", o.cfg.radial_trend_amplitude)
      .flag("--length-scale", o.cfg.field_length_scale)
      .flag("--field-std", o.cfg.field_std)
      .flag("--noise-std", o.cfg.noise_std)
      .flag("--label", o.cfg.source_label)
      .flag("--out", o.out);
  Manifest m = base_manifest("synth-wafer", argv);
  m.set("seed", std::to_string(o.cfg.seed));
  m.set("output.dataset", o.out);
  m.set("devices", std::to_string(d.size()));
  m.write_file(o.out + ".manifest");
  std::cout << "wrote " << o.out << " (" << d.size() << " devices)\n";
}

struct SynthFpgaOpts {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  FpgaSynthConfig cfg;
  std::string out_dir;
};

void run_synth_fpga(SynthFpgaOpts& o) {
  o.cfg.seed = resolve_seed(o.seed_given, o.seed, o.strict);
  const std::vector<Dataset> paths = gen_fpga(o.cfg);
  fs::create_directories(o.out_dir);
  for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
    char name[32];
    std::snprintf(name, sizeof name, "path-%02d.csv", p);
    write_csv_file(paths[static_cast<std::size_t>(p)], (fs::path(o.out_dir) / name).string());
  }

  ArgvBuilder argv("synth");
  argv.sub("fpga")
      .flag("--seed", o.cfg.seed)
      .flag("--width", o.cfg.width)
      .flag("--height", o.cfg.height)
      .flag("--points", o.cfg.n_points)
      .flag("--paths", o.cfg.n_paths)
      .flag("--length-scale", o.cfg.field_length_scale)
      .flag("--field-std", o.cfg.field_std)
      .flag("--family-field-std", o.cfg.family_field_std)
      .flag("--family-length-scale", o.cfg.family_length_scale)
      .flag("--row-gradient", o.cfg.row_gradient)
      .flag("--row-step-amp", o.cfg.row_step_amp)
      .flag("--row-step-pos", o.cfg.row_step_pos)
      .flag("--row-step-width", o.cfg.row_step_width)
      .flag("--column-period", o.cfg.column_period)
      .flag("--column-offset", o.cfg.column_offset)
      .flag("--row-regions", o.cfg.row_regions)
      .flag("--region-step", o.cfg.region_step)
      .flag("--path-offset-std", o.cfg.path_offset_std)
      .flag("--noise-std", o.cfg.noise_std)
      .flag("--label", o.cfg.source_label)
      .flag("--out-dir", o.out_dir);
  Manifest m = base_manifest("synth-fpga", argv);
  m.set("seed", std::to_string(o.cfg.seed));
  m.set("output.dir", o.out_dir);
  m.set("paths", std::to_string(paths.size()));
  m.write_file((fs::path(o.out_dir) / "run.manifest").string());
  std::cout << "wrote " << paths.size() << " path CSVs to " << o.out_dir << "\n";
}

// --------------------------------------------------------------- sample ----

struct SampleOpts {
  std::string data;
  std::string method;
  SamplingConfig cfg;
  SdeThresholds thresholds;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  std::string out;
};

void run_sample(SampleOpts& o) {
  if (!o.thresholds.valid()) {
    throw Error("invalid-thresholds", "alpha and beta must be non-negative and not both zero");
  }
  o.cfg.seed = resolve_seed(o.seed_given, o.seed, o.strict);
  const Dataset d = filter_faulty(parse_csv_file(o.data));
  const Method method = parse_method(o.method);
  const SamplingPlan plan = sample(d, method, o.cfg, o.thresholds);
  write_plan_csv_file(plan, d, o.out);

  ArgvBuilder argv("sample");
  argv.flag("--data", o.data)
      .flag("--method", o.method)
      .flag("--p", o.cfg.p)
      .flag("--seed", o.cfg.seed)
      .flag("--strata", o.cfg.strata_count)
      .flag("--clusters", o.cfg.cluster_count)
      .flag("--alpha", o.thresholds.alpha)
      .flag("--beta", o.thresholds.beta)
      .flag("--out", o.out);
  Manifest m = base_manifest("sample", argv);
  m.set("seed", std::to_string(o.cfg.seed));
  m.set("input.dataset", o.data);
  m.set("output.plan", o.out);
  m.set("train_size", std::to_string(plan.train.size()));
  m.write_file(o.out + ".manifest");
  std::cout << "wrote " << o.out << " (" << plan.train.size() << " train / " << plan.test.size()
            << " test)\n";
}

// -------------------------------------------------------------- predict ----

struct PredictOpts {
  std::string data;
  std::string plan;
  std::string out;
  std::string metrics;
};

void run_predict(PredictOpts& o) {
  const Dataset d = filter_faulty(parse_csv_file(o.data));
  const SamplingPlan plan = read_plan_csv_file(o.plan, d.size());
  const PlanEvaluation ev = evaluate_plan(d, plan, FitConfig<double>{});
  if (o.metrics.empty()) o.metrics = o.out + ".metrics.csv";

  std::ostringstream pred;
  pred << "x,y,truth,prediction\n";
  for (std::size_t i = 0; i < plan.test.size(); ++i) {
    const SpatialSample& s = d.samples()[static_cast<std::size_t>(plan.test[i])];
    pred << s.x << ',' << s.y << ',' << g17(s.value) << ','
         << g17(ev.predictions_raw(static_cast<int>(i))) << '\n';
  }
  write_text_atomic(o.out, pred.str());

  std::ostringstream met;
  met << "dataset,n,train_size,rmsd_raw,rmsd_normalized,length_scale,signal_variance,"
         "noise_variance,log_marginal\n";
  met << d.meta().source << ',' << d.size() << ',' << plan.train.size() << ','
      << g17(ev.rmsd_raw) << ',' << g17(ev.rmsd_normalized) << ','
      << g17(ev.hyperparams.length_scale) << ',' << g17(ev.hyperparams.signal_variance) << ','
      << g17(ev.hyperparams.noise_variance) << ',' << g17(ev.log_marginal) << '\n';
  write_text_atomic(o.metrics, met.str());

  ArgvBuilder argv("predict");
  argv.flag("--data", o.data)
      .flag("--plan", o.plan)
      .flag("--out", o.out)
      .flag("--metrics", o.metrics);
  Manifest m = base_manifest("predict", argv);
  m.set("input.dataset", o.data);
  m.set("input.plan", o.plan);
  m.set("output.predictions", o.out);
  m.set("output.metrics", o.metrics);
  m.write_file(o.out + ".manifest");
  std::cout << "rmsd_raw=" << g17(ev.rmsd_raw) << " rmsd_normalized=" << g17(ev.rmsd_normalized)
            << "\n";
}

// ---------------------------------------------------------------- sweep ----

struct SweepOpts {
  std::string data;
  SamplingConfig cfg;
  int reps = 5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  std::string out;
};

void run_sweep(SweepOpts& o) {
  o.cfg.seed = resolve_seed(o.seed_given, o.seed, o.strict);
  const Dataset d = filter_faulty(parse_csv_file(o.data));
  PipelineConfig cfg;
  cfg.sampling = o.cfg;
  const SweepResult res = sweep_alpha_beta(d, cfg, o.reps);

  std::ostringstream out;
  write_sweep_csv(res, out);
  write_text_atomic(o.out, out.str());

  ArgvBuilder argv("sweep");
  argv.flag("--data", o.data)
      .flag("--p", o.cfg.p)
      .flag("--seed", o.cfg.seed)
      .flag("--reps", o.reps)
      .flag("--out", o.out);
  Manifest m = base_manifest("sweep", argv);
  m.set("seed", std::to_string(o.cfg.seed));
  m.set("input.dataset", o.data);
  m.set("output.sweep", o.out);
  m.set("argmin", std::to_string(res.argmin.alpha) + "," + std::to_string(res.argmin.beta));
  m.write_file(o.out + ".manifest");
  std::cout << "argmin (alpha,beta) = (" << res.argmin.alpha << ',' << res.argmin.beta
            << ") mean rmsd " << g17(res.argmin_value) << "\n";
}

// -------------------------------------------------------------- compare ----

struct CompareOpts {
  std::vector<std::string> data;
  SamplingConfig cfg;
  SdeThresholds thresholds;
  int reps = 5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  std::string out_dir;
};

void run_compare(CompareOpts& o) {
  if (!o.thresholds.valid()) {
    throw Error("invalid-thresholds", "alpha and beta must be non-negative and not both zero");
  }
  o.cfg.seed = resolve_seed(o.seed_given, o.seed, o.strict);
  std::vector<Dataset> datasets;
  datasets.reserve(o.data.size());
  for (const std::string& path : o.data) {
    datasets.push_back(filter_faulty(parse_csv_file(path)));
  }
  PipelineConfig cfg;
  cfg.sampling = o.cfg;
  cfg.thresholds = o.thresholds;
  const ExperimentReport report = compare_methods(datasets, cfg, o.reps);

  fs::create_directories(o.out_dir);
  auto emit = [&](const char* name, auto writer) {
    std::ostringstream out;
    writer(report, out);
    write_text_atomic((fs::path(o.out_dir) / name).string(), out.str());
  };
  emit("methods.csv", write_methods_csv);
  emit("groups.csv", write_groups_csv);
  emit("runs.csv", write_runs_csv);
  emit("improvements.csv", write_improvements_csv);

  ArgvBuilder argv("compare");
  for (const std::string& path : o.data) argv.flag("--data", path);
  argv.flag("--p", o.cfg.p)
      .flag("--seed", o.cfg.seed)
      .flag("--reps", o.reps)
      .flag("--strata", o.cfg.strata_count)
      .flag("--clusters", o.cfg.cluster_count)
      .flag("--alpha", o.thresholds.alpha)
      .flag("--beta", o.thresholds.beta)
      .flag("--out-dir", o.out_dir);
  Manifest m = base_manifest("compare", argv);
  m.set("seed", std::to_string(o.cfg.seed));
  m.set("reps", std::to_string(o.reps));
  for (std::size_t i = 0; i < o.data.size(); ++i) {
    m.set("input." + std::to_string(i), o.data[i]);
  }
  m.set("output.dir", o.out_dir);
  m.write_file((fs::path(o.out_dir) / "run.manifest").string());
  print_report(report, std::cout);
}

// -------------------------------------------------------------- heatmap ----

struct HeatmapOpts {
  std::string data;
  std::string plan;
  std::string predictions;
  HeatmapOptions render;
  std::string out;
};

void run_heatmap(HeatmapOpts& o) {
  const Dataset d = parse_csv_file(o.data);

  std::vector<double> override_values;
  const std::vector<double>* values = nullptr;
  if (!o.predictions.empty()) {
    CsvSchema schema;
    schema.value = "prediction";
    const Dataset preds = parse_csv_file(o.predictions, schema);
    std::map<std::pair<int, int>, double> at;
    for (const SpatialSample& s : preds.samples()) at[{s.x, s.y}] = s.value;
    override_values.reserve(static_cast<std::size_t>(d.size()));
    for (const SpatialSample& s : d.samples()) {
      const auto it = at.find({s.x, s.y});
      override_values.push_back(it == at.end() ? s.value : it->second);
    }
    values = &override_values;
  }

  SamplingPlan plan;
  const SamplingPlan* plan_ptr = nullptr;
  if (!o.plan.empty()) {
    plan = read_plan_csv_file(o.plan, d.size());
    plan_ptr = &plan;
  }

  write_text_atomic(o.out, render_heatmap_svg(d, o.render, values, plan_ptr));

  ArgvBuilder argv("heatmap");
  argv.flag("--data", o.data);
  if (!o.plan.empty()) argv.flag("--plan", o.plan);
  if (!o.predictions.empty()) argv.flag("--predictions", o.predictions);
  argv.flag("--cell-size", o.render.cell_px);
  if (!o.render.title.empty()) argv.flag("--title", o.render.title);
  argv.flag("--out", o.out);
  Manifest m = base_manifest("heatmap", argv);
  m.set("input.dataset", o.data);
  m.set("output.svg", o.out);
  m.write_file(o.out + ".manifest");
  std::cout << "wrote " << o.out << "\n";
}

// --------------------------------------------------------------- replay ----

void run_replay(const std::string& manifest_path) {
  const Manifest m = Manifest::parse_file(manifest_path);
  const std::vector<std::string> argv = m.argv();
  if (argv.empty()) {
    throw Error("manifest-malformed", "manifest has no argv tokens to replay");
  }
  const int rc = dispatch(argv);
  if (rc != 0) {
    throw Error("replay-failed", "replayed command exited with status " + std::to_string(rc));
  }
}

// ------------------------------------------------------------- dispatch ----

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"spatial sampling + GPR reconstruction toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
  synth->require_subcommand(1);
  SynthWaferOpts wafer;
  auto* synth_wafer = synth->add_subcommand("wafer", "disk-masked wafer map");
  auto* wafer_seed = synth_wafer->add_option("--seed", wafer.seed, "RNG seed");
  synth_wafer->add_flag("--strict", wafer.strict, "require an explicit --seed");
  synth_wafer->add_option("--devices", wafer.cfg.approx_devices, "approximate device count");
  synth_wafer->add_option("--trend-amplitude", wafer.cfg.radial_trend_amplitude,
                          "radial quadratic trend amplitude");
  synth_wafer->add_option("--length-scale", wafer.cfg.field_length_scale,
                          "smooth field length scale (grid units)");
  synth_wafer->add_option("--field-std", wafer.cfg.field_std, "smooth field std");
  synth_wafer->add_option("--noise-std", wafer.cfg.noise_std, "iid noise std");
  synth_wafer->add_option("--label", wafer.cfg.source_label, "dataset source label");
  synth_wafer->add_option("--out", wafer.out, "output CSV path")->required();

  SynthFpgaOpts fpga;
  auto* synth_fpga = synth->add_subcommand("fpga", "multi-path RO fingerprint");
  auto* fpga_seed = synth_fpga->add_option("--seed", fpga.seed, "RNG seed");
  synth_fpga->add_flag("--strict", fpga.strict, "require an explicit --seed");
  synth_fpga->add_option("--width", fpga.cfg.width, "grid width");
  synth_fpga->add_option("--height", fpga.cfg.height, "grid height");
  synth_fpga->add_option("--points", fpga.cfg.n_points, "occupied cells");
  synth_fpga->add_option("--paths", fpga.cfg.n_paths, "measurement paths");
  synth_fpga->add_option("--length-scale", fpga.cfg.field_length_scale,
                         "common field length scale");
  synth_fpga->add_option("--field-std", fpga.cfg.field_std, "common field std");
  synth_fpga->add_option("--family-field-std", fpga.cfg.family_field_std,
                         "fabric-family field std shared by all devices (0 = off)");
  synth_fpga->add_option("--family-length-scale", fpga.cfg.family_length_scale,
                         "fabric-family field length scale");
  synth_fpga->add_option("--row-gradient", fpga.cfg.row_gradient,
                         "systematic value drift per row");
  synth_fpga->add_option("--row-step-amp", fpga.cfg.row_step_amp,
                         "half-gap of the smooth shift between die halves (0 = off)");
  synth_fpga->add_option("--row-step-pos", fpga.cfg.row_step_pos,
                         "row where the half-to-half shift crosses zero");
  synth_fpga->add_option("--row-step-width", fpga.cfg.row_step_width,
                         "transition width of the half-to-half shift in rows");
  synth_fpga->add_option("--column-period", fpga.cfg.column_period,
                         "alternating column block width (0 = uniform fabric)");
  synth_fpga->add_option("--column-offset", fpga.cfg.column_offset,
                         "value gap between adjacent column blocks");
  synth_fpga->add_option("--row-regions", fpga.cfg.row_regions,
                         "clock-region band count (0 = uniform rows)");
  synth_fpga->add_option("--region-step", fpga.cfg.region_step,
                         "level spacing between region bands");
  synth_fpga->add_option("--path-offset-std", fpga.cfg.path_offset_std,
                         "per-path constant offset std");
  synth_fpga->add_option("--noise-std", fpga.cfg.noise_std, "per-path iid noise std");
  synth_fpga->add_option("--label", fpga.cfg.source_label, "device label (source prefix)");
  synth_fpga->add_option("--out-dir", fpga.out_dir, "output directory")->required();

  // sample
  SampleOpts smp;
  auto* sample_cmd = app.add_subcommand("sample", "draw a train/test plan");
  sample_cmd->add_option("--data", smp.data, "input dataset CSV")->required();
  sample_cmd->add_option("--method", smp.method,
                         "random|stratified|kmeans|sde|s-sde|k-sde")
      ->required();
  sample_cmd->add_option("--p", smp.cfg.p, "sampling fraction");
  auto* smp_seed = sample_cmd->add_option("--seed", smp.seed, "RNG seed");
  sample_cmd->add_flag("--strict", smp.strict, "require an explicit --seed");
  sample_cmd->add_option("--strata", smp.cfg.strata_count, "stratum count");
  sample_cmd->add_option("--clusters", smp.cfg.cluster_count, "k-means cluster count");
  sample_cmd->add_option("--alpha", smp.thresholds.alpha, "SDE x-distance threshold");
  sample_cmd->add_option("--beta", smp.thresholds.beta, "SDE y-distance threshold");
  sample_cmd->add_option("--out", smp.out, "output plan CSV")->required();

  // predict
  PredictOpts prd;
  auto* predict_cmd = app.add_subcommand("predict", "fit on a plan's train split and score");
  predict_cmd->add_option("--data", prd.data, "input dataset CSV")->required();
  predict_cmd->add_option("--plan", prd.plan, "plan CSV from `sample`")->required();
  predict_cmd->add_option("--out", prd.out, "predictions CSV")->required();
  predict_cmd->add_option("--metrics", prd.metrics, "metrics CSV (default <out>.metrics.csv)");

  // sweep
  SweepOpts swp;
  auto* sweep_cmd = app.add_subcommand("sweep", "mean RMSD over the (alpha,beta) grid");
  sweep_cmd->add_option("--data", swp.data, "input dataset CSV")->required();
  sweep_cmd->add_option("--p", swp.cfg.p, "sampling fraction");
  auto* swp_seed = sweep_cmd->add_option("--seed", swp.seed, "base RNG seed");
  sweep_cmd->add_flag("--strict", swp.strict, "require an explicit --seed");
  sweep_cmd->add_option("--reps", swp.reps, "repetitions per cell");
  sweep_cmd->add_option("--out", swp.out, "output grid CSV")->required();

  // compare
  CompareOpts cmp;
  auto* compare_cmd = app.add_subcommand("compare", "five-method comparison report");
  compare_cmd->add_option("--data", cmp.data, "dataset CSVs")->required()->expected(-1);
  compare_cmd->add_option("--p", cmp.cfg.p, "sampling fraction");
  auto* cmp_seed = compare_cmd->add_option("--seed", cmp.seed, "base RNG seed");
  compare_cmd->add_flag("--strict", cmp.strict, "require an explicit --seed");
  compare_cmd->add_option("--reps", cmp.reps, "repetitions per dataset/method");
  compare_cmd->add_option("--strata", cmp.cfg.strata_count, "stratum count");
  compare_cmd->add_option("--clusters", cmp.cfg.cluster_count, "k-means cluster count");
  compare_cmd->add_option("--alpha", cmp.thresholds.alpha, "SDE x-distance threshold");
  compare_cmd->add_option("--beta", cmp.thresholds.beta, "SDE y-distance threshold");
  compare_cmd->add_option("--out-dir", cmp.out_dir, "report directory")->required();

  // heatmap
  HeatmapOpts hmp;
  auto* heatmap_cmd = app.add_subcommand("heatmap", "render a dataset as SVG");
  heatmap_cmd->add_option("--data", hmp.data, "input dataset CSV")->required();
  heatmap_cmd->add_option("--plan", hmp.plan, "plan CSV; outlines train cells");
  heatmap_cmd->add_option("--predictions", hmp.predictions,
                          "predictions CSV; rendered instead of truth");
  heatmap_cmd->add_option("--cell-size", hmp.render.cell_px, "cell size in px");
  heatmap_cmd->add_option("--title", hmp.render.title, "caption text");
  heatmap_cmd->add_option("--out", hmp.out, "output SVG path")->required();

  // replay
  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest file")->required();

  std::vector<const char*> argv;
  argv.push_back("wafergp");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  wafer.seed_given = wafer_seed->count() > 0;
  fpga.seed_given = fpga_seed->count() > 0;
  smp.seed_given = smp_seed->count() > 0;
  swp.seed_given = swp_seed->count() > 0;
  cmp.seed_given = cmp_seed->count() > 0;

  if (synth_wafer->parsed()) {
    run_synth_wafer(wafer);
  } else if (synth_fpga->parsed()) {
    run_synth_fpga(fpga);
  } else if (sample_cmd->parsed()) {
    run_sample(smp);
  } else if (predict_cmd->parsed()) {
    run_predict(prd);
  } else if (sweep_cmd->parsed()) {
    run_sweep(swp);
  } else if (compare_cmd->parsed()) {
    run_compare(cmp);
  } else if (heatmap_cmd->parsed()) {
    run_heatmap(hmp);
  } else if (replay_cmd->parsed()) {
    run_replay(manifest_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 1 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    return dispatch(args);
  } catch (const wafergp::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
