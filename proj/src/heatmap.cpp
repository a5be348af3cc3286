#include "wafergp/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wafergp/error.hpp"

namespace wafergp {

namespace {

struct Color {
  double r, g, b;
};

// Sequential dark-blue-to-yellow ramp sampled at nine stops.
constexpr Color kRamp[] = {
    {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
    {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
    {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441}, {0.478, 0.821, 0.318},
};
constexpr int kStops = static_cast<int>(sizeof(kRamp) / sizeof(kRamp[0]));

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (kStops - 1);
  const int i = std::min(static_cast<int>(pos), kStops - 2);
  const double f = pos - i;
  const Color& a = kRamp[i];
  const Color& b = kRamp[i + 1];
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(255.0 * (a.r + f * (b.r - a.r)))),
                static_cast<int>(std::lround(255.0 * (a.g + f * (b.g - a.g)))),
                static_cast<int>(std::lround(255.0 * (a.b + f * (b.b - a.b)))));
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_heatmap_svg(const Dataset& d, const HeatmapOptions& opts,
                               const std::vector<double>* values,
                               const SamplingPlan* plan) {
  if (d.size() == 0) {
    throw Error("empty-dataset", "nothing to render");
  }
  if (values && static_cast<int>(values->size()) != d.size()) {
    throw Error("length-mismatch", "override values do not match the dataset size");
  }
  if (opts.cell_px < 1) {
    throw Error("invalid-config", "cell size must be >= 1 px");
  }

  auto value_at = [&](int i) {
    return values ? (*values)[static_cast<std::size_t>(i)]
                  : d.samples()[static_cast<std::size_t>(i)].value;
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.size(); ++i) {
    lo = std::min(lo, value_at(i));
    hi = std::max(hi, value_at(i));
  }
  const bool degenerate = lo == hi;

  const GridBounds& b = d.bounds();
  const int cell = opts.cell_px;
  const int margin = 10;
  const int title_h = opts.title.empty() ? 0 : 22;
  const int legend_h = 40;
  const int map_w = b.width * cell;
  const int map_h = b.height * cell;
  const int w = map_w + 2 * margin;
  const int h = map_h + 2 * margin + title_h + legend_h;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
  if (!opts.title.empty()) {
    svg << "<text x=\"" << w / 2 << "\" y=\"16\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(opts.title) << "</text>\n";
  }

  const int ox = margin;
  const int oy = margin + title_h;
  for (int i = 0; i < d.size(); ++i) {
    const SpatialSample& s = d.samples()[static_cast<std::size_t>(i)];
    const double t = degenerate ? 0.5 : (value_at(i) - lo) / (hi - lo);
    svg << "<rect class=\"cell\" x=\"" << ox + (s.x - b.min_x) * cell << "\" y=\""
        << oy + (s.y - b.min_y) * cell << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"" << ramp_color(t) << "\"/>\n";
  }

  if (plan) {
    check_plan(*plan, d.size());
    for (int idx : plan->train) {
      const SpatialSample& s = d.samples()[static_cast<std::size_t>(idx)];
      svg << "<rect class=\"train-outline\" x=\"" << ox + (s.x - b.min_x) * cell
          << "\" y=\"" << oy + (s.y - b.min_y) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell
          << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    }
  }

  // Legend: gradient bar with min/max labels.
  const int ly = oy + map_h + 12;
  const int lw = std::max(80, map_w / 2);
  svg << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"0\" x2=\"1\" y2=\"0\">";
  for (int i = 0; i < kStops; ++i) {
    const double t = static_cast<double>(i) / (kStops - 1);
    svg << "<stop offset=\"" << g6(100.0 * t) << "%\" stop-color=\"" << ramp_color(t)
        << "\"/>";
  }
  svg << "</linearGradient></defs>\n";
  svg << "<rect x=\"" << ox << "\" y=\"" << ly << "\" width=\"" << lw
      << "\" height=\"10\" fill=\"url(#ramp)\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
  if (degenerate) {
    svg << "<text x=\"" << ox << "\" y=\"" << ly + 24
        << "\" font-family=\"sans-serif\" font-size=\"11\">min=max=" << g6(lo)
        << "</text>\n";
  } else {
    svg << "<text x=\"" << ox << "\" y=\"" << ly + 24
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << g6(lo) << "</text>\n";
    svg << "<text x=\"" << ox + lw << "\" y=\"" << ly + 24
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << g6(hi)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace wafergp
