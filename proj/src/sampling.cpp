#include "wafergp/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "wafergp/error.hpp"
#include "wafergp/rng.hpp"

namespace wafergp {

namespace {

// Child-seed layout shared by every grouped strategy: group g draws from
// derive_seed(seed, g + 1); the global top-up draws from derive_seed(seed, 0).
// Pure SDE is the single-group case, so k_sde with k = 1 replays it exactly.
constexpr std::uint64_t kTopUpTag = 0;

std::uint64_t group_seed(std::uint64_t seed, int group) {
  return derive_seed(seed, static_cast<std::uint64_t>(group) + 1);
}

void validate_config(const SamplingConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) {
    throw Error("invalid-config", "sampling fraction p must lie in (0, 1)");
  }
  if (cfg.strata_count < 1) {
    throw Error("invalid-config", "strata count must be >= 1");
  }
  if (cfg.cluster_count < 1) {
    throw Error("invalid-config", "cluster count must be >= 1");
  }
}

int checked_target(double p, int n) {
  const int target = train_target(p, n);
  if (target < 1 || target >= n) {
    throw Error("invalid-sampling-target",
                "train size round(p*N) = " + std::to_string(target) +
                    " must be in [1, N) for N = " + std::to_string(n));
  }
  return target;
}

/// Fills `plan.test` with the ascending complement of the train set.
void finish_plan(SamplingPlan& plan, int n) {
  std::vector<char> in_train(static_cast<std::size_t>(n), 0);
  for (int idx : plan.train) in_train[static_cast<std::size_t>(idx)] = 1;
  plan.test.clear();
  plan.test.reserve(static_cast<std::size_t>(n) - plan.train.size());
  for (int i = 0; i < n; ++i) {
    if (!in_train[static_cast<std::size_t>(i)]) plan.test.push_back(i);
  }
}

/// Uniform draw of `need` indices from those not yet in the plan, appended
/// with backfill provenance. `group_of` may be empty (group -1).
void global_top_up(SamplingPlan& plan, int n, int need, std::uint64_t seed,
                   const std::vector<int>& group_of) {
  if (need <= 0) return;
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (int idx : plan.train) taken[static_cast<std::size_t>(idx)] = 1;
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(n) - plan.train.size());
  for (int i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) pool.push_back(i);
  }

  Rng rng(seed);
  const std::vector<int> picks =
      rng.sample_without_replacement(static_cast<int>(pool.size()), need);
  for (int p : picks) {
    const int idx = pool[static_cast<std::size_t>(p)];
    plan.train.push_back(idx);
    plan.provenance.push_back(Provenance::backfill);
    plan.group.push_back(group_of.empty() ? -1 : group_of[static_cast<std::size_t>(idx)]);
  }
}

/// Shared body of the grouped strategies: per-group floor-sized selection,
/// then global top-up to the exact round(p*N) contract.
template <typename SelectGroup>
SamplingPlan grouped_plan(const Dataset& d, const SamplingConfig& cfg,
                          const std::vector<std::vector<int>>& groups,
                          SelectGroup&& select_group) {
  const int n = d.size();
  const int target = checked_target(cfg.p, n);

  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    for (int idx : groups[static_cast<std::size_t>(g)]) {
      group_of[static_cast<std::size_t>(idx)] = g;
    }
  }

  SamplingPlan plan;
  plan.train.reserve(static_cast<std::size_t>(target));
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    const std::vector<int>& members = groups[static_cast<std::size_t>(g)];
    const int quota = static_cast<int>(
        std::floor(cfg.p * static_cast<double>(members.size())));
    if (quota <= 0) continue;
    select_group(g, members, quota, plan);
  }

  global_top_up(plan, n, target - static_cast<int>(plan.train.size()),
                derive_seed(cfg.seed, kTopUpTag), group_of);
  finish_plan(plan, n);
  check_plan(plan, n);
  return plan;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "random") return Method::random;
  if (name == "stratified") return Method::stratified;
  if (name == "kmeans" || name == "k-means") return Method::kmeans;
  if (name == "sde") return Method::sde;
  if (name == "s-sde") return Method::s_sde;
  if (name == "k-sde") return Method::k_sde;
  throw Error("unknown-method",
              "unknown sampling method '" + name +
                  "' (expected random, stratified, kmeans, sde, s-sde or k-sde)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::random: return "random";
    case Method::stratified: return "stratified";
    case Method::kmeans: return "kmeans";
    case Method::sde: return "sde";
    case Method::s_sde: return "s-sde";
    case Method::k_sde: return "k-sde";
  }
  return "?";
}

const std::vector<Method>& comparison_methods() {
  static const std::vector<Method> methods{Method::random, Method::stratified,
                                           Method::kmeans, Method::s_sde, Method::k_sde};
  return methods;
}

int train_target(double p, int n) {
  return static_cast<int>(std::lround(p * static_cast<double>(n)));
}

void check_plan(const SamplingPlan& plan, int n) {
  if (plan.provenance.size() != plan.train.size() || plan.group.size() != plan.train.size()) {
    throw Error("invalid-plan", "provenance/group arrays do not match the train set");
  }
  if (plan.train.size() + plan.test.size() != static_cast<std::size_t>(n)) {
    throw Error("invalid-plan", "train and test do not partition the dataset");
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int idx : plan.train) {
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) {
      throw Error("invalid-plan", "train index " + std::to_string(idx) + " out of range or repeated");
    }
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  for (int idx : plan.test) {
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) {
      throw Error("invalid-plan", "test index " + std::to_string(idx) + " out of range or overlapping train");
    }
    seen[static_cast<std::size_t>(idx)] = 1;
  }
}

SamplingPlan random_sampling(const Dataset& d, const SamplingConfig& cfg) {
  validate_config(cfg);
  const int n = d.size();
  const int target = checked_target(cfg.p, n);

  Rng rng(cfg.seed);
  SamplingPlan plan;
  plan.train = rng.sample_without_replacement(n, target);
  plan.provenance.assign(plan.train.size(), Provenance::primary);
  plan.group.assign(plan.train.size(), -1);
  finish_plan(plan, n);
  check_plan(plan, n);
  return plan;
}

StratumSpec make_strata(const Dataset& d, int strata_count) {
  const int n = d.size();
  if (strata_count < 1) {
    throw Error("invalid-config", "strata count must be >= 1");
  }
  if (n < strata_count) {
    throw Error("too-few-samples", "N = " + std::to_string(n) + " is smaller than S = " +
                                       std::to_string(strata_count));
  }

  // (value, index) lexicographic rank; equal values split deterministically.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& samples = d.samples();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = samples[static_cast<std::size_t>(a)].value;
    const double vb = samples[static_cast<std::size_t>(b)].value;
    return va < vb || (va == vb && a < b);
  });

  StratumSpec spec;
  spec.strata.resize(static_cast<std::size_t>(strata_count));
  const int base = n / strata_count;
  const int extra = n % strata_count;
  std::size_t pos = 0;
  for (int s = 0; s < strata_count; ++s) {
    const int size = base + (s < extra ? 1 : 0);
    auto& members = spec.strata[static_cast<std::size_t>(s)];
    members.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                   order.begin() + static_cast<std::ptrdiff_t>(pos) + size);
    std::sort(members.begin(), members.end());
    if (s > 0) {
      const double boundary = samples[static_cast<std::size_t>(order[pos])].value;
      if (spec.boundaries.empty() || boundary > spec.boundaries.back()) {
        spec.boundaries.push_back(boundary);
      }
    }
    pos += static_cast<std::size_t>(size);
  }
  return spec;
}

SamplingPlan stratified_sampling(const Dataset& d, const SamplingConfig& cfg) {
  validate_config(cfg);
  const StratumSpec spec = make_strata(d, cfg.strata_count);
  return grouped_plan(d, cfg, spec.strata,
                      [&](int g, const std::vector<int>& members, int quota,
                          SamplingPlan& plan) {
                        Rng rng(group_seed(cfg.seed, g));
                        for (int p : rng.sample_without_replacement(
                                 static_cast<int>(members.size()), quota)) {
                          plan.train.push_back(members[static_cast<std::size_t>(p)]);
                          plan.provenance.push_back(Provenance::primary);
                          plan.group.push_back(g);
                        }
                      });
}

KMeansResult kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed) {
  const int n = static_cast<int>(values.size());
  if (k < 1) {
    throw Error("invalid-config", "cluster count must be >= 1");
  }
  if (n < k) {
    throw Error("too-few-samples",
                "N = " + std::to_string(n) + " is smaller than k = " + std::to_string(k));
  }

  Rng rng(seed);
  KMeansResult res;
  res.centroids.resize(static_cast<std::size_t>(k));

  // k-means++ seeding on scalar values.
  res.centroids[0] = values[rng.below(static_cast<std::uint64_t>(n))];
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < j; ++c) {
        const double diff = values[static_cast<std::size_t>(i)] -
                            res.centroids[static_cast<std::size_t>(c)];
        best = std::min(best, diff * diff);
      }
      d2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    if (total <= 0.0) {
      res.centroids[static_cast<std::size_t>(j)] =
          values[rng.below(static_cast<std::uint64_t>(n))];
      continue;
    }
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    int pick = n - 1;
    for (int i = 0; i < n; ++i) {
      acc += d2[static_cast<std::size_t>(i)];
      if (acc > r) {
        pick = i;
        break;
      }
    }
    res.centroids[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(pick)];
  }

  res.labels.assign(static_cast<std::size_t>(n), 0);
  constexpr int kMaxIterations = 100;
  constexpr double kShiftTolerance = 1e-9;

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    // Assignment; ties break to the lowest cluster index.
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_j = 0;
      for (int j = 0; j < k; ++j) {
        const double diff = values[static_cast<std::size_t>(i)] -
                            res.centroids[static_cast<std::size_t>(j)];
        const double dist = diff * diff;
        if (dist < best) {
          best = dist;
          best_j = j;
        }
      }
      res.labels[static_cast<std::size_t>(i)] = best_j;
    }

    // Empty clusters steal the point farthest from its assigned centroid.
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
    std::vector<char> pinned(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < k; ++j) {
      if (count[static_cast<std::size_t>(j)] > 0) continue;
      double far = -1.0;
      int far_i = -1;
      for (int i = 0; i < n; ++i) {
        if (pinned[static_cast<std::size_t>(i)]) continue;
        const int c = res.labels[static_cast<std::size_t>(i)];
        if (count[static_cast<std::size_t>(c)] <= 1) continue;  // do not empty another cluster
        const double diff = values[static_cast<std::size_t>(i)] -
                            res.centroids[static_cast<std::size_t>(c)];
        const double dist = diff * diff;
        if (dist > far) {
          far = dist;
          far_i = i;
        }
      }
      if (far_i < 0) continue;
      --count[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(far_i)])];
      res.labels[static_cast<std::size_t>(far_i)] = j;
      ++count[static_cast<std::size_t>(j)];
      pinned[static_cast<std::size_t>(far_i)] = 1;
    }

    // Centroid update.
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])] +=
          values[static_cast<std::size_t>(i)];
      ++count[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
    }
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
      if (count[static_cast<std::size_t>(j)] == 0) continue;
      const double updated =
          sum[static_cast<std::size_t>(j)] / static_cast<double>(count[static_cast<std::size_t>(j)]);
      shift = std::max(shift, std::abs(updated - res.centroids[static_cast<std::size_t>(j)]));
      res.centroids[static_cast<std::size_t>(j)] = updated;
    }

    res.iterations = iter;
    if (shift < kShiftTolerance) break;
  }

  res.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = values[static_cast<std::size_t>(i)] -
                        res.centroids[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
    res.inertia += diff * diff;
  }
  return res;
}

SamplingPlan kmeans_sampling(const Dataset& d, const SamplingConfig& cfg) {
  validate_config(cfg);
  const int n = d.size();
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = d.samples()[static_cast<std::size_t>(i)].value;

  const KMeansResult km = kmeans_1d(values, cfg.cluster_count, cfg.seed);
  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(cfg.cluster_count));
  for (int i = 0; i < n; ++i) {
    clusters[static_cast<std::size_t>(km.labels[static_cast<std::size_t>(i)])].push_back(i);
  }

  return grouped_plan(d, cfg, clusters,
                      [&](int g, const std::vector<int>& members, int quota,
                          SamplingPlan& plan) {
                        Rng rng(group_seed(cfg.seed, g));
                        for (int p : rng.sample_without_replacement(
                                 static_cast<int>(members.size()), quota)) {
                          plan.train.push_back(members[static_cast<std::size_t>(p)]);
                          plan.provenance.push_back(Provenance::primary);
                          plan.group.push_back(g);
                        }
                      });
}

bool sde_predicate(int ax, int ay, int bx, int by, const SdeThresholds& t) {
  return std::abs(ax - bx) >= t.alpha && std::abs(ay - by) >= t.beta;
}

SdeSelection sde_select(const std::vector<SpatialSample>& pool, int target_count,
                        const SdeThresholds& t, std::uint64_t seed) {
  if (!t.valid()) {
    throw Error("invalid-thresholds", "alpha and beta must be non-negative and not both zero");
  }
  const int n = static_cast<int>(pool.size());
  if (target_count < 0 || target_count > n) {
    throw Error("invalid-sampling-target",
                "SDE target " + std::to_string(target_count) + " exceeds pool size " +
                    std::to_string(n));
  }

  Rng rng(seed);
  const std::vector<int> visit = rng.permutation(n);

  SdeSelection sel;
  std::vector<int> discarded;
  // Phase 1: greedy acceptance against every point kept so far. Stops as
  // soon as the quota is met; later candidates are never examined.
  for (int pos : visit) {
    if (static_cast<int>(sel.selected.size()) >= target_count) break;
    const SpatialSample& cand = pool[static_cast<std::size_t>(pos)];
    bool ok = true;
    for (int acc : sel.selected) {
      const SpatialSample& a = pool[static_cast<std::size_t>(acc)];
      if (!sde_predicate(cand.x, cand.y, a.x, a.y, t)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      sel.selected.push_back(pos);
      sel.provenance.push_back(Provenance::primary);
    } else {
      discarded.push_back(pos);
    }
  }

  // Phase 2: uniform draws from the discarded set until the quota is met.
  const int need = target_count - static_cast<int>(sel.selected.size());
  if (need > 0) {
    for (int p : rng.sample_without_replacement(static_cast<int>(discarded.size()), need)) {
      sel.selected.push_back(discarded[static_cast<std::size_t>(p)]);
      sel.provenance.push_back(Provenance::backfill);
    }
  }
  return sel;
}

namespace {

/// Grouped SDE body shared by sde/s-sde/k-sde.
SamplingPlan grouped_sde(const Dataset& d, const SamplingConfig& cfg,
                         const std::vector<std::vector<int>>& groups, const SdeThresholds& t) {
  if (!t.valid()) {
    throw Error("invalid-thresholds", "alpha and beta must be non-negative and not both zero");
  }
  return grouped_plan(
      d, cfg, groups,
      [&](int g, const std::vector<int>& members, int quota, SamplingPlan& plan) {
        std::vector<SpatialSample> pool;
        pool.reserve(members.size());
        for (int idx : members) pool.push_back(d.samples()[static_cast<std::size_t>(idx)]);
        const SdeSelection sel = sde_select(pool, quota, t, group_seed(cfg.seed, g));
        for (std::size_t i = 0; i < sel.selected.size(); ++i) {
          plan.train.push_back(members[static_cast<std::size_t>(sel.selected[i])]);
          plan.provenance.push_back(sel.provenance[i]);
          plan.group.push_back(g);
        }
      });
}

}  // namespace

SamplingPlan sde_sampling(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t) {
  validate_config(cfg);
  std::vector<std::vector<int>> whole(1);
  whole[0].resize(static_cast<std::size_t>(d.size()));
  std::iota(whole[0].begin(), whole[0].end(), 0);
  return grouped_sde(d, cfg, whole, t);
}

SamplingPlan s_sde(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t) {
  validate_config(cfg);
  const StratumSpec spec = make_strata(d, cfg.strata_count);
  return grouped_sde(d, cfg, spec.strata, t);
}

SamplingPlan k_sde(const Dataset& d, const SamplingConfig& cfg, const SdeThresholds& t) {
  validate_config(cfg);
  const int n = d.size();
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = d.samples()[static_cast<std::size_t>(i)].value;
  const KMeansResult km = kmeans_1d(values, cfg.cluster_count, cfg.seed);
  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(cfg.cluster_count));
  for (int i = 0; i < n; ++i) {
    clusters[static_cast<std::size_t>(km.labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  return grouped_sde(d, cfg, clusters, t);
}

SamplingPlan sample(const Dataset& d, Method method, const SamplingConfig& cfg,
                    const SdeThresholds& t) {
  switch (method) {
    case Method::random: return random_sampling(d, cfg);
    case Method::stratified: return stratified_sampling(d, cfg);
    case Method::kmeans: return kmeans_sampling(d, cfg);
    case Method::sde: return sde_sampling(d, cfg, t);
    case Method::s_sde: return s_sde(d, cfg, t);
    case Method::k_sde: return k_sde(d, cfg, t);
  }
  throw Error("unknown-method", "unhandled sampling method");
}

void write_plan_csv(const SamplingPlan& plan, const Dataset& d, std::ostream& out) {
  const int n = d.size();
  check_plan(plan, n);

  struct Row {
    int order = -1;  // selection position for train rows
    int prov = -1;   // 0 primary, 1 backfill
    int group = -1;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < plan.train.size(); ++i) {
    Row& r = rows[static_cast<std::size_t>(plan.train[i])];
    r.order = static_cast<int>(i);
    r.prov = plan.provenance[i] == Provenance::primary ? 0 : 1;
    r.group = plan.group[i];
  }

  out << "# n=" << n << "\n";
  out << "index,x,y,role,order,provenance,group\n";
  for (int i = 0; i < n; ++i) {
    const SpatialSample& s = d.samples()[static_cast<std::size_t>(i)];
    const Row& r = rows[static_cast<std::size_t>(i)];
    out << i << ',' << s.x << ',' << s.y << ',';
    if (r.order >= 0) {
      out << "train," << r.order << ',' << (r.prov == 0 ? "primary" : "backfill") << ',';
      if (r.group >= 0) out << r.group;
    } else {
      out << "test,,,";
    }
    out << '\n';
  }
}

void write_plan_csv_file(const SamplingPlan& plan, const Dataset& d, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("io", "cannot open '" + tmp.string() + "' for writing");
    write_plan_csv(plan, d, out);
  }
  fs::rename(tmp, target);
}

SamplingPlan read_plan_csv(std::istream& in, int n) {
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  long declared_n = -1;

  struct TrainRow {
    int index;
    int order;
    Provenance prov;
    int group;
  };
  std::vector<TrainRow> train_rows;
  std::vector<int> test_rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ')) sv.remove_suffix(1);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      const auto eq = sv.find("n=");
      if (eq != std::string_view::npos) {
        long v = 0;
        auto [ptr, ec] = std::from_chars(sv.data() + eq + 2, sv.data() + sv.size(), v);
        if (ec == std::errc{} && ptr == sv.data() + sv.size()) declared_n = v;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }

    std::vector<std::string> f;
    {
      std::size_t start = 0;
      for (std::size_t i = 0; i <= sv.size(); ++i) {
        if (i == sv.size() || sv[i] == ',') {
          f.emplace_back(sv.substr(start, i - start));
          start = i + 1;
        }
      }
    }
    if (f.size() < 7) {
      throw Error("plan-malformed", "line " + std::to_string(line_no) + ": expected 7 fields");
    }
    int index = -1;
    {
      auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), index);
      if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) {
        throw Error("plan-malformed", "line " + std::to_string(line_no) + ": bad index");
      }
    }
    if (index < 0 || index >= n) {
      throw Error("plan-mismatch", "plan references index " + std::to_string(index) +
                                       " outside the dataset (N = " + std::to_string(n) + ")");
    }
    if (f[3] == "train") {
      TrainRow r;
      r.index = index;
      auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), r.order);
      if (ec != std::errc{}) {
        throw Error("plan-malformed", "line " + std::to_string(line_no) + ": bad order field");
      }
      if (f[5] == "primary") {
        r.prov = Provenance::primary;
      } else if (f[5] == "backfill") {
        r.prov = Provenance::backfill;
      } else {
        throw Error("plan-malformed", "line " + std::to_string(line_no) + ": bad provenance");
      }
      r.group = -1;
      if (!f[6].empty()) {
        std::from_chars(f[6].data(), f[6].data() + f[6].size(), r.group);
      }
      train_rows.push_back(r);
    } else if (f[3] == "test") {
      test_rows.push_back(index);
    } else {
      throw Error("plan-malformed", "line " + std::to_string(line_no) + ": bad role '" + f[3] + "'");
    }
  }

  if (declared_n >= 0 && declared_n != n) {
    throw Error("plan-mismatch", "plan was written for N = " + std::to_string(declared_n) +
                                     " but the dataset has N = " + std::to_string(n));
  }

  std::sort(train_rows.begin(), train_rows.end(),
            [](const TrainRow& a, const TrainRow& b) { return a.order < b.order; });
  SamplingPlan plan;
  for (const TrainRow& r : train_rows) {
    plan.train.push_back(r.index);
    plan.provenance.push_back(r.prov);
    plan.group.push_back(r.group);
  }
  std::sort(test_rows.begin(), test_rows.end());
  plan.test = std::move(test_rows);
  check_plan(plan, n);
  return plan;
}

SamplingPlan read_plan_csv_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open '" + path + "' for reading");
  return read_plan_csv(in, n);
}

}  // namespace wafergp
