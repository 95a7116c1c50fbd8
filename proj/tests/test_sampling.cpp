#include <doctest.h>

#include <set>

#include "dmca/errors.hpp"
#include "dmca/sampling.hpp"
#include "oracles.hpp"

using namespace dmca;

TEST_SUITE("sampling") {

TEST_CASE("single candidate") {
  const Dataset ds = Dataset::from_rows({{1, 2}, {3, 4}});
  const MaximinTrace t = maximin_sample(ds, IndexSet{1}, {0.0, 0.0});
  CHECK(t.selected == std::vector<std::size_t>{1});
}

TEST_CASE("empty candidate set is an error") {
  const Dataset ds = Dataset::from_rows({{1, 2}});
  CHECK_THROWS_AS(maximin_sample(ds, IndexSet{}, {0.0}), InvalidArgument);
}

TEST_CASE("line {0, 100, 101} with uniform scores selects 0 then 101") {
  const Dataset ds = Dataset::from_rows({{0}, {100}, {101}});
  const MaximinTrace t = maximin_sample(ds, IndexSet::range(3), {0.5, 0.5, 0.5});
  CHECK(t.selected == std::vector<std::size_t>{0, 2});
  CHECK(t.projections[1] == 101.0);
}

TEST_CASE("seed is the highest-scoring candidate") {
  const Dataset ds = Dataset::from_rows({{0}, {100}, {101}});
  const MaximinTrace t = maximin_sample(ds, IndexSet::range(3), {0.1, 0.9, 0.2});
  CHECK(t.selected.front() == 1);
}

TEST_CASE("two separated 5-point clusters give one point from each") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::separated_clusters(rng, 2, 5, 50.0, 1.0);
    const ScoreVector scores = oracle::random_scores(rng, 10);
    const MaximinTrace t = maximin_sample(inst.data, IndexSet::range(10), scores);
    REQUIRE(t.selected.size() == 2);
    CHECK(inst.cluster_of[t.selected[0]] != inst.cluster_of[t.selected[1]]);
  }
}

TEST_CASE("projections are non-increasing after the first selection") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const Dataset ds = oracle::random_dataset(rng, n, 2);
    const MaximinTrace t =
        maximin_sample(ds, IndexSet::range(n), oracle::random_scores(rng, n), 1e-9);
    for (std::size_t k = 2; k < t.projections.size(); ++k) {
      CHECK(t.projections[k] <= t.projections[k - 1] + 1e-12);
    }
    // Each projection is the realized distance to the earlier selections.
    for (std::size_t k = 1; k < t.selected.size(); ++k) {
      double best = INFINITY;
      for (std::size_t j = 0; j < k; ++j) {
        best = std::min(best, oracle::dist(ds.row(t.selected[k]), ds.row(t.selected[j])));
      }
      CHECK(t.projections[k] == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("stop rule drops the triggering point") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    const Dataset ds = oracle::random_dataset(rng, n, 2);
    const MaximinTrace t = maximin_sample(ds, IndexSet::range(n), oracle::random_scores(rng, n));
    for (std::size_t k = 1; k < t.projections.size(); ++k) {
      CHECK(t.projections[k] >= 0.5 * t.projections[k - 1]);
    }
    std::set<std::size_t> unique(t.selected.begin(), t.selected.end());
    CHECK(unique.size() == t.selected.size());
  }
}

TEST_CASE("coverage on well-separated clusters, k = 2..6") {
  Rng rng(31);
  for (std::size_t k = 2; k <= 6; ++k) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto inst = oracle::separated_clusters(rng, k, 3 + rng.uniform_index(8), 20.0, 1.0);
      const std::size_t n = inst.data.size();
      const MaximinTrace t =
          maximin_sample(inst.data, IndexSet::range(n), oracle::random_scores(rng, n), 1e-9);
      REQUIRE(t.selected.size() >= k);
      std::set<std::size_t> hit;
      for (std::size_t j = 0; j < k; ++j) hit.insert(inst.cluster_of[t.selected[j]]);
      CHECK(hit.size() == k);
    }
  }
}

TEST_CASE("deterministic") {
  Rng rng(2);
  const Dataset ds = oracle::random_dataset(rng, 40, 3);
  const ScoreVector s = oracle::random_scores(rng, 40);
  const IndexSet cand{1, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  CHECK(maximin_sample(ds, cand, s).selected == maximin_sample(ds, cand, s).selected);
}

}  // TEST_SUITE
