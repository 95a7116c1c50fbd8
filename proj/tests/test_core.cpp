#include <doctest.h>

#include <cmath>
#include <map>

#include "dmca/core.hpp"
#include "dmca/errors.hpp"
#include "dmca/rng.hpp"
#include "oracles.hpp"

using namespace dmca;

TEST_SUITE("core") {

TEST_CASE("euclidean examples") {
  const std::vector<double> o2{0, 0}, p34{3, 4}, a3{1, 1, 1}, b3{2, 2, 2};
  CHECK(euclidean(o2, o2) == 0.0);
  CHECK(euclidean(o2, p34) == 5.0);
  CHECK(euclidean(a3, b3) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(euclidean(o2, a3), ContractViolation);
}

TEST_CASE("euclidean is symmetric, zero only on equal points, and obeys the triangle inequality") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const Dataset ds = oracle::random_dataset(rng, 3, d);
    const auto a = ds.row(0), b = ds.row(1), c = ds.row(2);
    CHECK(euclidean(a, b) == euclidean(b, a));
    CHECK(euclidean(a, a) == 0.0);
    CHECK(euclidean(a, b) > 0.0);
    CHECK(euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-12);
  }
}

TEST_CASE("distances_to examples") {
  const Dataset two = Dataset::from_rows({{0, 0}, {1, 0}});
  CHECK(distances_to(two, std::vector<double>{0, 0}) == std::vector<double>{0, 1});
  const Dataset one = Dataset::from_rows({{0, 0}});
  CHECK(distances_to(one, std::vector<double>{0, 3}) == std::vector<double>{3});
  const Dataset line = Dataset::from_rows({{0, 0}, {3, 4}, {6, 8}});
  CHECK(distances_to(line, std::vector<double>{0, 0}) == std::vector<double>{0, 5, 10});
  CHECK_THROWS_AS(distances_to(line, std::vector<double>{0, 0, 0}), ContractViolation);
}

TEST_CASE("distance from each row to itself is zero") {
  Rng rng(3);
  const Dataset ds = oracle::random_dataset(rng, 40, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(distances_to(ds, ds.row(i))[i] == 0.0);
}

TEST_CASE("subsample examples and errors") {
  Rng rng(1);
  CHECK(subsample_without_replacement(rng, 5, 5) == IndexSet{0, 1, 2, 3, 4});
  CHECK(subsample_without_replacement(rng, 1, 1) == IndexSet{0});
  CHECK_THROWS_AS(subsample_without_replacement(rng, 3, 4), InvalidArgument);
}

TEST_CASE("subsample has exact size, no repeats, and is deterministic per seed") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng a(seed), b(seed);
    const std::size_t n = 1 + a.uniform_index(60);
    b.uniform_index(60);
    const std::size_t psi = 1 + a.uniform_index(n);
    b.uniform_index(n);
    const IndexSet s = subsample_without_replacement(a, n, psi);
    CHECK(s.size() == psi);
    CHECK(s.within(n));
    CHECK(s == subsample_without_replacement(b, n, psi));
  }
}

TEST_CASE("subsample n=4 psi=2 is uniform over the six pairs") {
  const int seeds = 100000;
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const IndexSet s = subsample_without_replacement(rng, 4, 2);
    ++counts[{s[0], s[1]}];
  }
  CHECK(counts.size() == 6);
  const double expected = seeds / 6.0;
  const double sigma = std::sqrt(seeds * (1.0 / 6.0) * (5.0 / 6.0));
  double chi2 = 0.0;
  for (const auto& [pair, c] : counts) {
    CHECK(std::abs(c - expected) < 3.0 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 5 degrees of freedom; 99.9th percentile is 20.5.
  CHECK(chi2 < 20.5);
}

TEST_CASE("IndexSet set operations") {
  const IndexSet a{1, 3, 5}, b{3, 4};
  CHECK(a.set_union(b) == IndexSet{1, 3, 4, 5});
  CHECK(a.set_difference(b) == IndexSet{1, 5});
  CHECK(IndexSet::from_unsorted({5, 1, 5, 3}) == a);
  CHECK(a.contains(3));
  CHECK_FALSE(a.contains(4));
  CHECK_THROWS_AS(IndexSet(std::vector<std::size_t>{2, 2}), InvalidArgument);
}

TEST_CASE("Dataset rejects empty, ragged and non-finite input") {
  CHECK_THROWS_AS(Dataset(0, 2, {}), InvalidArgument);
  CHECK_THROWS_AS(Dataset::from_rows({{0, 0}, {1}}), InvalidArgument);
  CHECK_THROWS_AS(Dataset::from_rows({{0, NAN}}), InvalidArgument);
  CHECK_THROWS_AS(Dataset::from_rows({{INFINITY, 0}}), InvalidArgument);
  const Dataset ds = Dataset::from_rows({{0, 1}, {2, 3}, {4, 5}});
  CHECK(ds.subset(IndexSet{0, 2}) == Dataset::from_rows({{0, 1}, {4, 5}}));
}

TEST_CASE("GroundTruth labels must be contiguous") {
  const GroundTruth t({0, 0, 1, 1, -1, 2, 2});
  CHECK(t.num_clusters() == 2);
  CHECK(t.num_outliers() == 5);
  CHECK(t.clusters()[0] == IndexSet{2, 3});
  CHECK(t.clusters()[1] == IndexSet{5, 6});
  CHECK(t.scattered() == IndexSet{4});
  CHECK_THROWS_AS(GroundTruth({0, 2, 2}), ValidationError);
  CHECK_THROWS_AS(GroundTruth({0, -2}), ValidationError);
}

TEST_CASE("rng streams are reproducible and split streams differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  const Rng s1 = c.split(1), s2 = c.split(2);
  CHECK(c.counter() == 0);
  Rng x = s1, y = s2;
  CHECK(x.next_u64() != y.next_u64());
  Rng u(9);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform01();
    CHECK((v >= 0.0 && v < 1.0));
    CHECK(u.uniform_index(7) < 7);
  }
}

}  // TEST_SUITE
