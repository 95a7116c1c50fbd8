#include "dmca/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dmca/errors.hpp"

namespace dmca {

namespace {

using Point = std::vector<double>;

constexpr std::size_t kMaxPlacementAttempts = 20000;

double min_distance(const Point& x, const std::vector<Point>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::min(best, euclidean(x, p));
  return best;
}

void gaussian_blob(Rng& rng, std::vector<Point>& out, std::size_t count, double cx, double cy,
                   double stdev) {
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.normal(cx, stdev);
    const double y = rng.normal(cy, stdev);
    out.push_back({x, y});
  }
}

std::vector<Point> make_inliers(const GeneratorSpec& spec, Rng& rng) {
  std::vector<Point> pts;
  const std::size_t n = spec.n_inliers;
  switch (spec.family) {
    case Family::kSynthetic10: {
      const std::size_t a = n / 3;
      const std::size_t b = n / 3;
      gaussian_blob(rng, pts, a, 0.0, 0.0, 2.0);
      gaussian_blob(rng, pts, b, 8.0, 1.0, 1.6);
      gaussian_blob(rng, pts, n - a - b, 3.0, 8.0, 2.4);
      break;
    }
    case Family::kSpiral: {
      // Archimedean spiral r = 1.5 * theta, arms about 9.4 apart.
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = rng.uniform(0.5 * std::numbers::pi, 5.0 * std::numbers::pi);
        const double r = 1.5 * theta;
        pts.push_back({r * std::cos(theta) + rng.normal(0.0, 0.3),
                       r * std::sin(theta) + rng.normal(0.0, 0.3)});
      }
      break;
    }
    case Family::kSandwich: {
      for (std::size_t i = 0; i < n; ++i) {
        const double y0 = (i % 2 == 0) ? 0.0 : 8.0;
        pts.push_back({rng.uniform(0.0, 30.0), y0 + rng.uniform(0.0, 1.5)});
      }
      break;
    }
    case Family::kVDensity: {
      const std::size_t a = n / 2;
      gaussian_blob(rng, pts, a, 0.0, 0.0, 0.5);
      gaussian_blob(rng, pts, n - a, 12.0, 0.0, 2.5);
      break;
    }
    case Family::kBlobs: {
      const std::size_t k = std::max<std::size_t>(1, spec.blob_count);
      for (std::size_t b = 0; b < k; ++b) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(b) /
                             static_cast<double>(k);
        const std::size_t count = n / k + (b < n % k ? 1 : 0);
        gaussian_blob(rng, pts, count, 8.0 * std::cos(angle), 8.0 * std::sin(angle), 1.0);
      }
      break;
    }
  }
  return pts;
}

double diameter(const std::vector<Point>& pts) {
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, euclidean(pts[a], pts[b]));
  }
  return d;
}

}  // namespace

std::optional<Family> parse_family(std::string_view name) {
  if (name == "synthetic10") return Family::kSynthetic10;
  if (name == "spiral") return Family::kSpiral;
  if (name == "sandwich") return Family::kSandwich;
  if (name == "vdensity") return Family::kVDensity;
  if (name == "blobs") return Family::kBlobs;
  return std::nullopt;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::kSynthetic10: return "synthetic10";
    case Family::kSpiral: return "spiral";
    case Family::kSandwich: return "sandwich";
    case Family::kVDensity: return "vdensity";
    case Family::kBlobs: return "blobs";
  }
  return "unknown";
}

GeneratorSpec default_spec(Family family, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = family;
  spec.seed = seed;
  spec.n_scattered = 2;
  switch (family) {
    case Family::kSynthetic10:
      spec.n_inliers = 900;
      spec.micro_clusters.assign(10, {10, 0.15});
      spec.separation = 10.0;
      spec.max_gap = 3.0;
      break;
    case Family::kSpiral:
      spec.n_inliers = 4000;
      spec.micro_clusters.assign(6, {10, 0.2});
      spec.separation = 8.0;
      break;
    case Family::kSandwich:
    case Family::kVDensity:
      spec.n_inliers = 6000;
      spec.micro_clusters.assign(6, {10, 0.2});
      spec.separation = 8.0;
      break;
    case Family::kBlobs:
      spec.n_inliers = 900;
      spec.blob_count = 3;
      spec.micro_clusters.assign(4, {10, 0.2});
      spec.separation = 8.0;
      break;
  }
  return spec;
}

LabeledDataset generate(const GeneratorSpec& spec) {
  if (spec.n_inliers == 0) throw InvalidArgument("generate: need at least one inlier");
  if (!(spec.separation > 0.0)) throw InvalidArgument("generate: separation must be > 0");
  if (spec.max_gap < 0.0) throw InvalidArgument("generate: max gap must be >= 0");
  for (const auto& mc : spec.micro_clusters) {
    if (mc.size < 2) throw InvalidArgument("generate: micro-cluster size must be >= 2");
    if (!(mc.spread > 0.0)) throw InvalidArgument("generate: micro-cluster spread must be > 0");
  }

  Rng rng(spec.seed);
  const std::vector<Point> inliers = make_inliers(spec, rng);

  double lo_x = inliers[0][0], hi_x = lo_x, lo_y = inliers[0][1], hi_y = lo_y;
  for (const auto& p : inliers) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  double max_spread = 0.0;
  for (const auto& mc : spec.micro_clusters) max_spread = std::max(max_spread, mc.spread);
  if (max_spread == 0.0) max_spread = 0.2;
  const double margin = std::max(3.0, 2.0 * spec.separation * max_spread);
  lo_x -= margin;
  hi_x += margin;
  lo_y -= margin;
  hi_y += margin;
  auto random_location = [&] { return Point{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)}; };
  auto too_far = [&](const Point& c) {
    return spec.max_gap > 0.0 && min_distance(c, inliers) > spec.max_gap;
  };

  std::vector<std::vector<Point>> clusters;
  std::vector<Point> cluster_centers;
  std::vector<Point> placed_outliers;
  for (std::size_t k = 0; k < spec.micro_clusters.size(); ++k) {
    const auto& mc = spec.micro_clusters[k];
    const double gap = spec.separation * mc.spread;
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const Point c = random_location();
      if (min_distance(c, inliers) < gap || too_far(c)) continue;
      bool clear = true;
      for (std::size_t j = 0; j < cluster_centers.size(); ++j) {
        const double need =
            spec.separation * std::max(mc.spread, spec.micro_clusters[j].spread);
        if (euclidean(c, cluster_centers[j]) < need) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      std::vector<Point> members;
      gaussian_blob(rng, members, mc.size, c[0], c[1], mc.spread);
      const double diam = diameter(members);
      double nearest_other = std::numeric_limits<double>::infinity();
      for (const auto& m : members) {
        nearest_other = std::min(nearest_other, min_distance(m, inliers));
        nearest_other = std::min(nearest_other, min_distance(m, placed_outliers));
      }
      if (!(diam < nearest_other)) continue;
      cluster_centers.push_back(c);
      placed_outliers.insert(placed_outliers.end(), members.begin(), members.end());
      clusters.push_back(std::move(members));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place micro-cluster " + std::to_string(k + 1) +
                            " with separation " + std::to_string(spec.separation));
    }
  }

  std::vector<Point> scattered;
  const double scattered_gap = spec.separation * max_spread;
  for (std::size_t s = 0; s < spec.n_scattered; ++s) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const Point c = random_location();
      if (min_distance(c, inliers) < scattered_gap || too_far(c)) continue;
      if (min_distance(c, placed_outliers) < scattered_gap) continue;
      placed_outliers.push_back(c);
      scattered.push_back(c);
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place scattered outlier " + std::to_string(s + 1));
    }
  }

  // Well-separatedness of every planted cluster against all non-members.
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const double diam = diameter(clusters[k]);
    for (const auto& m : clusters[k]) {
      double nearest = min_distance(m, inliers);
      nearest = std::min(nearest, min_distance(m, scattered));
      for (std::size_t j = 0; j < clusters.size(); ++j) {
        if (j != k) nearest = std::min(nearest, min_distance(m, clusters[j]));
      }
      if (!(diam < nearest)) {
        throw GenerationError("micro-cluster " + std::to_string(k + 1) +
                              " is not separated from the rest of the data");
      }
    }
  }

  std::vector<Point> rows = inliers;
  std::vector<int> labels(inliers.size(), GroundTruth::kInlier);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    rows.insert(rows.end(), clusters[k].begin(), clusters[k].end());
    labels.insert(labels.end(), clusters[k].size(), static_cast<int>(k + 1));
  }
  rows.insert(rows.end(), scattered.begin(), scattered.end());
  labels.insert(labels.end(), scattered.size(), GroundTruth::kScattered);

  for (std::size_t i = rows.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(rows[i - 1], rows[j]);
    std::swap(labels[i - 1], labels[j]);
  }
  return {Dataset::from_rows(rows), GroundTruth(std::move(labels))};
}

double GaussianMixture::scalar_stdev(std::size_t c) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim; ++j) sum += variances[c * dim + j];
  return std::sqrt(sum / static_cast<double>(dim));
}

GaussianMixture fit_diagonal_gmm(const Dataset& data, std::size_t k, Rng& rng,
                                 std::size_t max_iterations, double tolerance) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (k == 0 || k > n) throw InvalidArgument("GMM: need 1 <= k <= number of points");

  // Variance floor relative to the overall data spread keeps components from
  // shrinking onto single points.
  std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) global_mean[j] += data.row(i)[j];
  }
  for (double& m : global_mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = data.row(i)[j] - global_mean[j];
      global_var[j] += diff * diff;
    }
  }
  double reg = 0.0;
  for (double& v : global_var) {
    v /= static_cast<double>(n);
    reg = std::max(reg, v);
  }
  reg = std::max(reg * 1e-6, 1e-12);

  GaussianMixture g;
  g.dim = d;
  g.weights.assign(k, 1.0 / static_cast<double>(k));
  g.means.resize(k * d);
  g.variances.resize(k * d);
  const IndexSet init = subsample_without_replacement(rng, n, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      g.means[c * d + j] = data.row(init[c])[j];
      g.variances[c * d + j] = global_var[j] + reg;
    }
  }

  std::vector<double> resp(n * k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    // E step in log space.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double lp = std::log(g.weights[c]);
        for (std::size_t j = 0; j < d; ++j) {
          const double var = g.variances[c * d + j];
          const double diff = data.row(i)[j] - g.means[c * d + j];
          lp -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + diff * diff / var);
        }
        resp[i * k + c] = lp;
        best = std::max(best, lp);
      }
      double total = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        resp[i * k + c] = std::exp(resp[i * k + c] - best);
        total += resp[i * k + c];
      }
      for (std::size_t c = 0; c < k; ++c) resp[i * k + c] /= total;
      ll += best + std::log(total);
    }

    // M step.
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i * k + c];
      if (nk < 1.0) throw GenerationError("GMM component collapsed during EM");
      g.weights[c] = nk / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += resp[i * k + c] * data.row(i)[j];
        mean /= nk;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double diff = data.row(i)[j] - mean;
          var += resp[i * k + c] * diff * diff;
        }
        g.means[c * d + j] = mean;
        g.variances[c * d + j] = var / nk + reg;
      }
    }
    if (std::abs(ll - prev_ll) <= tolerance * std::max(1.0, std::abs(ll))) break;
    prev_ll = ll;
  }
  return g;
}

LabeledDataset inject(const Dataset& inliers, const InjectionSpec& spec) {
  if (spec.k == 0) throw InvalidArgument("inject: k must be >= 1");
  if (inliers.size() < spec.k) throw InvalidArgument("inject: fewer inliers than components");
  for (const auto& c : spec.clusters) {
    if (c.size < 2) throw InvalidArgument("inject: cluster size must be >= 2");
    if (c.offset_scale < 0.0 || c.stdev_scale < 0.0) {
      throw InvalidArgument("inject: scales must be >= 0");
    }
  }

  const Rng root(spec.seed);
  std::optional<GaussianMixture> gmm;
  for (std::size_t attempt = 0; attempt <= spec.max_restarts && !gmm; ++attempt) {
    Rng em_rng = root.split(attempt + 1);
    try {
      gmm = fit_diagonal_gmm(inliers, spec.k, em_rng, spec.max_em_iterations);
    } catch (const GenerationError&) {
      log_warning("GMM fit collapsed; restarting with a new seed");
    }
  }
  if (!gmm) throw GenerationError("GMM fit failed after bounded restarts");

  Rng rng = root.split(0);
  const std::size_t d = inliers.dim();
  std::vector<double> values(inliers.values().begin(), inliers.values().end());
  std::vector<int> labels(inliers.size(), GroundTruth::kInlier);
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const auto& shape = spec.clusters[k];
    const auto comp = static_cast<std::size_t>(rng.uniform_index(gmm->components()));
    const double sigma = gmm->scalar_stdev(comp);

    std::vector<double> direction(d);
    double norm = 0.0;
    while (norm == 0.0) {
      norm = 0.0;
      for (double& v : direction) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
    }
    std::vector<double> center(d);
    for (std::size_t j = 0; j < d; ++j) {
      center[j] = gmm->means[comp * d + j] + shape.offset_scale * sigma * direction[j] / norm;
    }
    const double stdev = shape.stdev_scale * sigma;
    for (std::size_t m = 0; m < shape.size; ++m) {
      for (std::size_t j = 0; j < d; ++j) values.push_back(center[j] + stdev * rng.normal());
      labels.push_back(static_cast<int>(k + 1));
    }
  }
  const std::size_t n = labels.size();
  return {Dataset(n, d, std::move(values)), GroundTruth(std::move(labels))};
}

}  // namespace dmca
