#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dmca/core.hpp"
#include "dmca/rng.hpp"

namespace dmca {

struct LabeledDataset {
  Dataset data;
  GroundTruth truth;
};

enum class Family { kSynthetic10, kSpiral, kSandwich, kVDensity, kBlobs };

std::optional<Family> parse_family(std::string_view name);
const char* family_name(Family f);

struct MicroClusterShape {
  std::size_t size = 10;
  double spread = 0.2;  // isotropic stdev
};

struct GeneratorSpec {
  Family family = Family::kSynthetic10;
  std::size_t n_inliers = 900;
  std::vector<MicroClusterShape> micro_clusters;
  std::size_t n_scattered = 2;
  // Micro-cluster centers keep at least separation * spread from every inlier
  // and from each other.
  double separation = 10.0;
  // When > 0, micro-cluster centers and scattered points also stay within
  // max_gap of the nearest inlier.
  double max_gap = 0.0;
  std::uint64_t seed = 0;
  std::size_t blob_count = 3;  // kBlobs only
};

// Cardinalities of the named benchmark shapes: synthetic10 (900 inliers in 3
// touching blobs, outliers 1.5 to 3 from the inliers, 10 x 10 clustered, 2 scattered), spiral (4000, 6 x 10, 2), sandwich
// and vdensity (6000, 6 x 10, 2). kBlobs defaults to 3 blobs of 300 points
// with 4 micro-clusters.
GeneratorSpec default_spec(Family family, std::uint64_t seed = 0);

// Rows are shuffled; labels follow GroundTruth (clusters numbered 1..m in
// spec order). Throws GenerationError when placement fails.
LabeledDataset generate(const GeneratorSpec& spec);

// Diagonal-covariance Gaussian mixture.
struct GaussianMixture {
  std::size_t dim = 0;
  std::vector<double> weights;    // k
  std::vector<double> means;      // k x dim
  std::vector<double> variances;  // k x dim
  std::size_t components() const { return weights.size(); }
  // Root-mean-square of the component's per-axis stdevs.
  double scalar_stdev(std::size_t c) const;
};

// EM from k distinct random inliers as initial means. Throws GenerationError
// when a component collapses (fewer than one effective point).
GaussianMixture fit_diagonal_gmm(const Dataset& data, std::size_t k, Rng& rng,
                                 std::size_t max_iterations = 200, double tolerance = 1e-8);

struct InjectedClusterShape {
  std::size_t size = 10;
  double offset_scale = 5.0;  // center offset in component stdevs
  double stdev_scale = 0.1;   // cluster stdev in component stdevs
};

struct InjectionSpec {
  std::size_t k = 1;
  std::vector<InjectedClusterShape> clusters;
  std::uint64_t seed = 0;
  std::size_t max_em_iterations = 200;
  std::size_t max_restarts = 5;
};

// Appends Gaussian micro-clusters around mixture components fitted to the
// inliers. Original rows keep their order and label 0; injected clusters get
// labels 1..m in spec order.
LabeledDataset inject(const Dataset& inliers, const InjectionSpec& spec);

}  // namespace dmca
