#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "dmca/datagen.hpp"
#include "dmca/errors.hpp"
#include "oracles.hpp"

using namespace dmca;

namespace {

std::map<int, std::size_t> label_counts(const GroundTruth& t) {
  std::map<int, std::size_t> c;
  for (int l : t.labels()) ++c[l];
  return c;
}

double nearest_inlier(const LabeledDataset& ld, std::size_t i) {
  double best = INFINITY;
  for (std::size_t j = 0; j < ld.data.size(); ++j) {
    if (ld.truth.label(j) == 0) best = std::min(best, oracle::dist(ld.data.row(i), ld.data.row(j)));
  }
  return best;
}

Dataset gaussian_blob(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> v(n * d);
  for (double& x : v) x = rng.normal();
  return Dataset(n, d, std::move(v));
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("synthetic10 cardinalities") {
  const LabeledDataset ld = generate(default_spec(Family::kSynthetic10, 0));
  CHECK(ld.data.size() == 1002);
  CHECK(ld.data.dim() == 2);
  CHECK(ld.truth.num_outliers() == 102);
  CHECK(ld.truth.num_clusters() == 10);
  const auto c = label_counts(ld.truth);
  CHECK(c.at(0) == 900);
  CHECK(c.at(-1) == 2);
  for (int k = 1; k <= 10; ++k) CHECK(c.at(k) == 10);
}

TEST_CASE("other family cardinalities") {
  CHECK(generate(default_spec(Family::kSpiral, 1)).data.size() == 4062);
  CHECK(generate(default_spec(Family::kSandwich, 1)).data.size() == 6062);
  CHECK(generate(default_spec(Family::kVDensity, 1)).data.size() == 6062);
  for (Family f : {Family::kSpiral, Family::kSandwich, Family::kVDensity}) {
    const LabeledDataset ld = generate(default_spec(f, 2));
    CHECK(ld.truth.num_clusters() == 6);
    CHECK(ld.truth.scattered().size() == 2);
  }
}

TEST_CASE("per-label counts match any spec") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    GeneratorSpec spec = default_spec(Family::kBlobs, static_cast<std::uint64_t>(trial));
    spec.micro_clusters.clear();
    const std::size_t m = rng.uniform_index(5);
    for (std::size_t k = 0; k < m; ++k) {
      spec.micro_clusters.push_back({2 + rng.uniform_index(12), 0.1});
    }
    spec.n_scattered = rng.uniform_index(4);
    spec.n_inliers = 200 + rng.uniform_index(200);
    const LabeledDataset ld = generate(spec);
    const auto c = label_counts(ld.truth);
    CHECK(c.at(0) == spec.n_inliers);
    CHECK((spec.n_scattered == 0 ? c.count(-1) == 0 : c.at(-1) == spec.n_scattered));
    for (std::size_t k = 0; k < m; ++k) {
      CHECK(c.at(static_cast<int>(k + 1)) == spec.micro_clusters[k].size);
    }
  }
}

TEST_CASE("blobs without outliers are all inliers") {
  GeneratorSpec spec = default_spec(Family::kBlobs, 5);
  spec.micro_clusters.clear();
  spec.n_scattered = 0;
  const LabeledDataset ld = generate(spec);
  CHECK(ld.truth.num_outliers() == 0);
}

TEST_CASE("generation is deterministic per seed") {
  const LabeledDataset a = generate(default_spec(Family::kSynthetic10, 7));
  const LabeledDataset b = generate(default_spec(Family::kSynthetic10, 7));
  const LabeledDataset c = generate(default_spec(Family::kSynthetic10, 8));
  CHECK(a.data == b.data);
  CHECK(a.truth == b.truth);
  CHECK_FALSE(a.data == c.data);
}

TEST_CASE("planted clusters are well separated and near the inliers") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GeneratorSpec spec = default_spec(Family::kSynthetic10, seed);
    const LabeledDataset ld = generate(spec);
    for (const IndexSet& members : ld.truth.clusters()) {
      double diameter = 0.0;
      for (std::size_t a : members) {
        for (std::size_t b : members) {
          diameter = std::max(diameter, oracle::dist(ld.data.row(a), ld.data.row(b)));
        }
      }
      double nearest_other = INFINITY;
      for (std::size_t a : members) {
        for (std::size_t j = 0; j < ld.data.size(); ++j) {
          if (!members.contains(j)) {
            nearest_other = std::min(nearest_other, oracle::dist(ld.data.row(a), ld.data.row(j)));
          }
        }
      }
      CHECK(diameter < nearest_other);
      // The center stays within max_gap; members add at most a few spreads.
      for (std::size_t a : members) CHECK(nearest_inlier(ld, a) <= spec.max_gap + 1.0);
    }
    for (std::size_t s : ld.truth.scattered()) CHECK(nearest_inlier(ld, s) <= spec.max_gap);
  }
}

TEST_CASE("invalid specs are rejected") {
  GeneratorSpec spec = default_spec(Family::kBlobs, 0);
  spec.micro_clusters = {{1, 0.1}};
  CHECK_THROWS_AS(generate(spec), InvalidArgument);
  spec = default_spec(Family::kBlobs, 0);
  spec.max_gap = -1.0;
  CHECK_THROWS_AS(generate(spec), InvalidArgument);
  spec = default_spec(Family::kBlobs, 0);
  spec.separation = 1e6;
  spec.max_gap = 1.0;
  CHECK_THROWS_AS(generate(spec), GenerationError);
}

TEST_CASE("inject adds the requested clusters") {
  Rng rng(1);
  const Dataset inl = gaussian_blob(rng, 300, 3);
  InjectionSpec spec;
  spec.k = 2;
  spec.clusters = {{10, 5.0, 0.1}};
  const LabeledDataset ld = inject(inl, spec);
  CHECK(ld.data.size() == 310);
  CHECK(ld.truth.num_clusters() == 1);
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK(ld.truth.label(i) == 0);
    CHECK(std::equal(inl.row(i).begin(), inl.row(i).end(), ld.data.row(i).begin()));
  }
  const LabeledDataset again = inject(inl, spec);
  CHECK(again.data == ld.data);
}

TEST_CASE("zero offset and zero spread put every injected point on a component mean") {
  Rng rng(2);
  const Dataset inl = gaussian_blob(rng, 200, 2);
  InjectionSpec spec;
  spec.k = 3;
  spec.seed = 9;
  spec.clusters = {{5, 0.0, 0.0}, {4, 0.0, 0.0}};
  const LabeledDataset ld = inject(inl, spec);
  // Same stream the injector uses for its first EM attempt.
  Rng em = Rng(spec.seed).split(1);
  const GaussianMixture g = fit_diagonal_gmm(inl, spec.k, em, spec.max_em_iterations);
  for (std::size_t i = 200; i < ld.data.size(); ++i) {
    bool on_mean = false;
    for (std::size_t c = 0; c < g.components(); ++c) {
      on_mean = on_mean || (ld.data.row(i)[0] == g.means[c * 2] && ld.data.row(i)[1] == g.means[c * 2 + 1]);
    }
    CHECK(on_mean);
  }
}

TEST_CASE("far injections clear the inlier 99th-percentile radius") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Dataset inl = gaussian_blob(rng, 1000, 2);
    InjectionSpec spec;
    spec.k = 1;
    spec.seed = seed;
    spec.clusters = {{10, 8.0, 0.1}};
    const LabeledDataset ld = inject(inl, spec);

    std::vector<double> mean(2, 0.0);
    for (std::size_t i = 0; i < 1000; ++i) {
      mean[0] += inl.row(i)[0] / 1000.0;
      mean[1] += inl.row(i)[1] / 1000.0;
    }
    std::vector<double> radii;
    for (std::size_t i = 0; i < 1000; ++i) radii.push_back(oracle::dist(inl.row(i), mean));
    std::sort(radii.begin(), radii.end());
    const double q99 = radii[989];
    for (std::size_t i = 1000; i < 1010; ++i) CHECK(nearest_inlier(ld, i) > q99);
  }
}

TEST_CASE("gmm recovers two well-separated components") {
  Rng rng(4);
  std::vector<double> v;
  for (int i = 0; i < 400; ++i) {
    const double cx = i % 2 == 0 ? -10.0 : 10.0;
    v.push_back(cx + rng.normal());
    v.push_back(rng.normal());
  }
  const Dataset ds(400, 2, v);
  Rng em(1);
  const GaussianMixture g = fit_diagonal_gmm(ds, 2, em);
  std::vector<double> xs{g.means[0], g.means[2]};
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(-10.0).epsilon(0.02));
  CHECK(xs[1] == doctest::Approx(10.0).epsilon(0.02));
  CHECK(g.weights[0] == doctest::Approx(0.5).epsilon(0.05));
  for (std::size_t c = 0; c < 2; ++c) CHECK(g.scalar_stdev(c) == doctest::Approx(1.0).epsilon(0.15));
}

}  // TEST_SUITE
