#include "dmca/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "dmca/dmca.hpp"
#include "dmca/errors.hpp"

namespace dmca {

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string star(double cx, double cy, double r, const char* fill) {
  std::string pts;
  for (int k = 0; k < 10; ++k) {
    const double rad = (k % 2 == 0) ? r : 0.45 * r;
    const double a = -std::numbers::pi / 2.0 + k * std::numbers::pi / 5.0;
    if (!pts.empty()) pts += ' ';
    pts += fmt(cx + rad * std::cos(a)) + "," + fmt(cy + rad * std::sin(a));
  }
  return "<polygon points=\"" + pts + "\" fill=\"" + fill +
         "\" stroke=\"black\" stroke-width=\"0.4\"/>\n";
}

}  // namespace

std::string render_svg(const PlotInput& input, int size) {
  if (input.data == nullptr) throw InvalidArgument("plot: no dataset");
  const Dataset& ds = *input.data;
  if (ds.dim() != 2) {
    throw InvalidArgument("plot: dataset has " + std::to_string(ds.dim()) +
                          " dimensions; only 2D data can be plotted");
  }
  const std::size_t n = ds.size();
  if (input.scores != nullptr && input.scores->size() != n) {
    throw ContractViolation("plot: scores length does not match dataset");
  }
  if (input.truth != nullptr && input.truth->size() != n) {
    throw ContractViolation("plot: labels length does not match dataset");
  }

  std::vector<std::optional<std::size_t>> cluster_of(n);
  if (input.clusters != nullptr) {
    for (std::size_t c = 0; c < input.clusters->size(); ++c) {
      for (std::size_t i : input.clusters->clusters[c]) {
        if (i >= n) throw ContractViolation("plot: cluster index out of range");
        cluster_of[i] = c;
      }
    }
  }

  std::vector<bool> outlier(n, false);
  for (std::size_t i = 0; i < n; ++i) outlier[i] = cluster_of[i].has_value();
  if (input.scores != nullptr) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t p = default_checkpoints(n);
    const auto& s = *input.scores;
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(p), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        return s[a] > s[b] || (s[a] == s[b] && a < b);
                      });
    for (std::size_t k = 0; k < p; ++k) outlier[idx[k]] = true;
  } else if (input.truth != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      if (input.truth->label(i) != GroundTruth::kInlier) outlier[i] = true;
    }
  }

  double lo_x = ds.row(0)[0], hi_x = lo_x, lo_y = ds.row(0)[1], hi_y = lo_y;
  for (std::size_t i = 0; i < n; ++i) {
    lo_x = std::min(lo_x, ds.row(i)[0]);
    hi_x = std::max(hi_x, ds.row(i)[0]);
    lo_y = std::min(lo_y, ds.row(i)[1]);
    hi_y = std::max(hi_y, ds.row(i)[1]);
  }
  const double margin = 24.0;
  const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (size - 2.0 * margin) / extent;
  auto px = [&](double x) { return margin + (x - lo_x) * scale; };
  auto py = [&](double y) { return size - margin - (y - lo_y) * scale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
         "\" height=\"" + std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) +
         " " + std::to_string(size) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g id=\"inliers\" fill=\"#b0b0b0\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    if (outlier[i]) continue;
    svg += "<circle cx=\"" + fmt(px(ds.row(i)[0])) + "\" cy=\"" + fmt(py(ds.row(i)[1])) +
           "\" r=\"2\"/>\n";
  }
  svg += "</g>\n<g id=\"outliers\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    if (!outlier[i]) continue;
    const double score = input.scores != nullptr ? std::clamp((*input.scores)[i], 0.0, 1.0) : 0.5;
    const char* fill = cluster_of[i] ? kPalette[*cluster_of[i] % kPalette.size()] : "black";
    svg += star(px(ds.row(i)[0]), py(ds.row(i)[1]), 3.0 + 7.0 * score, fill);
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace dmca
