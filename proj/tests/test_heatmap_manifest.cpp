#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "wafergp/dataset.hpp"
#include "wafergp/error.hpp"
#include "wafergp/heatmap.hpp"
#include "wafergp/manifest.hpp"
#include "wafergp/sampling.hpp"

using namespace wafergp;

namespace {

Dataset tiny_grid() {
  std::vector<SpatialSample> samples;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) {
      samples.push_back({x, y, static_cast<double>(x + 10 * y), true});
    }
  }
  DatasetMeta meta;
  meta.source = "tiny";
  return Dataset::from_samples(std::move(samples), meta);
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("heatmap draws one cell per sample") {
  const Dataset d = tiny_grid();
  const std::string svg = render_heatmap_svg(d, {});
  CHECK(count_occurrences(svg, "<rect class=\"cell\"") == d.size());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("train-outline") == std::string::npos);
}

TEST_CASE("heatmap outlines the training picks when given a plan") {
  const Dataset d = tiny_grid();
  SamplingConfig cfg;
  cfg.p = 0.25;
  cfg.seed = 9;
  const SamplingPlan plan = random_sampling(d, cfg);
  const std::string svg = render_heatmap_svg(d, {}, nullptr, &plan);
  CHECK(count_occurrences(svg, "<rect class=\"cell\"") == d.size());
  CHECK(count_occurrences(svg, "<rect class=\"train-outline\"") ==
        static_cast<int>(plan.train.size()));
}

TEST_CASE("heatmap can color by external values") {
  const Dataset d = tiny_grid();
  std::vector<double> values(static_cast<std::size_t>(d.size()), 1.5);
  values[0] = -1.5;
  const std::string svg = render_heatmap_svg(d, {}, &values);
  CHECK(count_occurrences(svg, "<rect class=\"cell\"") == d.size());

  std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_AS(render_heatmap_svg(d, {}, &wrong), Error);
}

TEST_CASE("heatmap flags a flat value range") {
  std::vector<SpatialSample> samples{{0, 0, 2.5, true}, {1, 0, 2.5, true}, {2, 0, 2.5, true}};
  const Dataset d = Dataset::from_samples(std::move(samples), {});
  const std::string svg = render_heatmap_svg(d, {});
  CHECK(svg.find("min=max=") != std::string::npos);
}

TEST_CASE("heatmap titles and cell size are configurable") {
  const Dataset d = tiny_grid();
  HeatmapOptions opts;
  opts.title = "unit &test<";
  opts.cell_px = 12;
  const std::string svg = render_heatmap_svg(d, opts);
  CHECK(svg.find("unit &amp;test&lt;") != std::string::npos);

  opts.cell_px = 0;
  CHECK_THROWS_AS(render_heatmap_svg(d, opts), Error);
}

TEST_CASE("heatmap rejects an empty dataset") {
  CHECK_THROWS_AS(render_heatmap_svg(Dataset{}, {}), Error);
}

TEST_CASE("manifest stores ordered key-value pairs") {
  Manifest m;
  m.set("command", "sample");
  m.set("seed", "42");
  m.set("argv.0", "sample");
  m.set("argv.1", "--seed");
  m.set("argv.2", "42");
  CHECK(m.has("seed"));
  CHECK_FALSE(m.has("missing"));
  CHECK(m.get("seed") == "42");
  CHECK_THROWS_AS(m.get("missing"), Error);
  CHECK(m.argv() == std::vector<std::string>{"sample", "--seed", "42"});
  CHECK(m.entries().front().first == "command");
}

TEST_CASE("manifest set overwrites in place") {
  Manifest m;
  m.set("a", "1");
  m.set("b", "2");
  m.set("a", "3");
  CHECK(m.get("a") == "3");
  CHECK(m.entries().size() == 2);
  CHECK(m.entries()[0].first == "a");
}

TEST_CASE("manifest round-trips through text") {
  Manifest m;
  m.set("command", "synth wafer");
  m.set("out", "/tmp/data dir/wafer.csv");
  m.set("seed", "18446744073709551615");
  std::ostringstream out;
  m.write(out);
  std::istringstream in(out.str());
  const Manifest back = Manifest::parse(in);
  CHECK(back.entries() == m.entries());
}

TEST_CASE("manifest parse reports the offending line") {
  std::istringstream in("# run manifest\nkey = value\nbroken-line\n");
  try {
    Manifest::parse(in);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "manifest-malformed");
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("manifest file round-trip") {
  const std::string path = "manifest_roundtrip.tmp";
  Manifest m;
  m.set("command", "predict");
  m.set("plan", "plan.csv");
  m.write_file(path);
  const Manifest back = Manifest::parse_file(path);
  CHECK(back.entries() == m.entries());
  std::remove(path.c_str());
}

TEST_CASE("manifest parse_file rejects a missing path") {
  CHECK_THROWS_AS(Manifest::parse_file("does_not_exist.manifest"), Error);
}
