#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dmca/dmca.hpp"
#include "dmca/errors.hpp"
#include "dmca/sampling.hpp"
#include "oracles.hpp"

using namespace dmca;

namespace {

// n_blob points in a tight blob at the origin plus extra rows given by the
// caller.
Dataset blob_plus(Rng& rng, std::size_t n_blob, double sd,
                  const std::vector<std::vector<double>>& extra) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n_blob; ++i) rows.push_back({rng.normal(0.0, sd), rng.normal(0.0, sd)});
  for (const auto& r : extra) rows.push_back(r);
  return Dataset::from_rows(rows);
}

std::vector<std::vector<double>> micro_cluster(Rng& rng, double cx, double cy, std::size_t k,
                                               double sd) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < k; ++i) rows.push_back({rng.normal(cx, sd), rng.normal(cy, sd)});
  return rows;
}

ClothesLine line_of(std::vector<double> d, std::vector<double> a) {
  ClothesLine l;
  l.distances = std::move(d);
  l.running_mean = std::move(a);
  l.order.resize(l.distances.size());
  return l;
}

}  // namespace

TEST_SUITE("dmca") {

TEST_CASE("default checkpoints") {
  CHECK(default_checkpoints(1002) == 101);
  CHECK(default_checkpoints(10) == 1);
  CHECK(default_checkpoints(3) == 1);
  CHECK(default_checkpoints(21, 0.1) == 3);
  CHECK_THROWS_AS(default_checkpoints(10, 0.0), InvalidArgument);
}

TEST_CASE("clothes_line examples") {
  const Dataset one = Dataset::from_rows({{3, 4}});
  const ClothesLine l1 = clothes_line(one, {0.4}, std::vector<double>{0, 0});
  CHECK(l1.distances == std::vector<double>{5});
  CHECK(l1.running_mean == std::vector<double>{0.4});

  const Dataset ds = Dataset::from_rows({{0, 0}, {1, 0}, {5, 0}});
  const ClothesLine l = clothes_line(ds, {0.9, 0.1, 0.2}, ds.row(0));
  CHECK(l.order == std::vector<std::size_t>{0, 1, 2});
  CHECK(l.running_mean[0] == 0.9);
  CHECK(l.running_mean[1] == doctest::Approx(0.5).epsilon(1e-15));

  Rng rng(1);
  const Dataset r = oracle::random_dataset(rng, 30, 2);
  const ClothesLine flat = clothes_line(r, ScoreVector(30, 0.375), r.row(4));
  for (double a : flat.running_mean) CHECK(a == 0.375);
  CHECK(std::is_sorted(flat.distances.begin(), flat.distances.end()));
  CHECK(flat.order.front() == 4);
}

TEST_CASE("weighted_area examples") {
  CHECK(weighted_area(line_of({0, 1, 2}, {1.0, 0.75, 0.5}), 1.5) == 1.625);
  CHECK(weighted_area(line_of({0, 3, 4}, {0.5, 0.25, 0.2}), 0.0) == 0.5 * 3 * 3 * 0.5);
  CHECK(weighted_area(line_of({0, 1, 2, 3}, {0, 0, 0, 0}), 10.0) == 0.0);
  CHECK(weighted_area(line_of({1, 2}, {1, 1}), 0.5) == 0.0);
}

TEST_CASE("weighted_area agrees with the brute-force oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(200);
    const Dataset ds = oracle::random_dataset(rng, n, 1 + rng.uniform_index(4));
    const ScoreVector s = oracle::random_scores(rng, n);
    const Dataset anchor_ds = oracle::random_dataset(rng, 1, ds.dim());
    const auto anchor = rng.uniform01() < 0.5 ? ds.row(rng.uniform_index(n)) : anchor_ds.row(0);
    const double r_max = rng.uniform(0.0, 25.0);
    const double got = weighted_area(clothes_line(ds, s, anchor), r_max);
    const double want = oracle::weighted_area(ds, s, anchor, r_max);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("max_projection_radius examples") {
  const Dataset ds = Dataset::from_rows({{0, 0}, {3, 4}, {10, 0}, {0, 2}, {1, 0}});
  CHECK(max_projection_radius(ds, IndexSet{0}, IndexSet{0}) == 0.0);
  CHECK(max_projection_radius(ds, IndexSet{0}, IndexSet{1, 2}) == 5.0);
  CHECK(max_projection_radius(ds, IndexSet{0, 3}, IndexSet{4}) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK_THROWS_AS(max_projection_radius(ds, IndexSet{}, IndexSet{4}), InvalidArgument);
}

TEST_CASE("warm-up psi schedule") {
  CHECK(warmup_psi_schedule(16, 1) == std::vector<std::size_t>{2});
  CHECK(warmup_psi_schedule(16, 5) == std::vector<std::size_t>{2, 6, 9, 13, 16});
  CHECK(warmup_psi_schedule(3, 4) == std::vector<std::size_t>{2, 2, 3, 3});
  CHECK(warmup_psi_schedule(2, 3) == std::vector<std::size_t>{2, 2, 2});
  const auto s = warmup_psi_schedule(256, 50);
  CHECK(s.size() == 50);
  CHECK(s.front() == 2);
  CHECK(s.back() == 256);
  CHECK(std::is_sorted(s.begin(), s.end()));
}

TEST_CASE("step on blob plus singleton prunes the singleton") {
  Rng data(3);
  const Dataset ds = blob_plus(data, 20, 0.3, {{30, 30}});
  Dmca0Config cfg;
  // Every point is a center, so no blob point is uncovered and tied at 1.
  cfg.psi = 21;
  cfg.checkpoints = 2;
  Dmca0State st = Dmca0State::initial(ds, IndexSet::range(ds.size()));
  Rng rng(5);
  StepTrace tr;
  dmca0_step(st, ds, cfg, rng, nullptr, PruningMode::kClothesLine, &tr);
  CHECK(tr.top.contains(20));
  CHECK(std::find(tr.representatives.begin(), tr.representatives.end(), 20) !=
        tr.representatives.end());
  CHECK(tr.candidates.contains(20));
  CHECK(tr.newly_pruned.contains(20));
  CHECK_FALSE(st.clean.contains(20));
}

TEST_CASE("first step equals one iNNE round on the whole dataset") {
  Rng data(4);
  const Dataset ds = oracle::random_dataset(data, 80, 2);
  Dmca0Config cfg;
  cfg.psi = 10;
  Dmca0State st = Dmca0State::initial(ds, IndexSet::range(80));
  Rng a(77), b(77);
  dmca0_step(st, ds, cfg, a);
  const HypersphereModel m = fit_hyperspheres(ds, IndexSet::range(80), 10, b);
  CHECK(st.scores == score_hyperspheres(m, ds));
}

TEST_CASE("identical points: scores 0 and no pruning") {
  const Dataset ds = Dataset::from_rows(std::vector<std::vector<double>>(12, {1.0, 1.0}));
  Dmca0Config cfg;
  cfg.psi = 4;
  cfg.iterations = 3;
  const Dmca0Result r = run_dmca0(ds, cfg);
  for (double s : r.scores) CHECK(s == 0.0);
  for (const auto& d : r.diagnostics) {
    CHECK(d.candidates == 0);
    CHECK(d.pruned_total == 0);
  }
  CHECK(r.clusters.empty());
}

TEST_CASE("running average equals the mean of the stored rounds") {
  Rng data(6);
  std::vector<std::vector<double>> extra = micro_cluster(data, 6, 6, 6, 0.1);
  const Dataset ds = blob_plus(data, 150, 1.0, extra);
  Dmca0Config cfg;
  cfg.psi = 16;
  Dmca0State st = Dmca0State::initial(ds, IndexSet::range(ds.size()));
  Rng rng(8);
  std::vector<double> sum(ds.size(), 0.0);
  for (int t = 1; t <= 40; ++t) {
    StepTrace tr;
    dmca0_step(st, ds, cfg, rng, nullptr, PruningMode::kClothesLine, &tr);
    for (std::size_t i = 0; i < ds.size(); ++i) sum[i] += tr.round_scores[i];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(std::abs(st.scores[i] - sum[i] / t) <= 1e-12);
      CHECK((st.scores[i] >= 0.0 && st.scores[i] <= 1.0));
    }
  }
}

TEST_CASE("representative structure and area bookkeeping") {
  Rng data(9);
  std::vector<std::vector<double>> extra = micro_cluster(data, 7, 0, 8, 0.1);
  for (auto& r : micro_cluster(data, -6, 5, 8, 0.1)) extra.push_back(r);
  const Dataset ds = blob_plus(data, 200, 1.5, extra);
  Dmca0Config cfg;
  cfg.psi = 16;
  const std::size_t p = default_checkpoints(ds.size());
  Dmca0State st = Dmca0State::initial(ds, IndexSet::range(ds.size()));
  Rng rng(10);
  for (int t = 0; t < 25; ++t) {
    StepTrace tr;
    dmca0_step(st, ds, cfg, rng, nullptr, PruningMode::kClothesLine, &tr);
    CHECK(tr.top.size() == p);
    const IndexSet reps = IndexSet::from_unsorted(tr.representatives);
    for (std::size_t h : reps) CHECK(tr.top.contains(h));
    for (std::size_t c : tr.candidates) CHECK(reps.contains(c));
    // Anchors are H united with the centers; each area matches the direct
    // clothes-line computation.
    CHECK(IndexSet(tr.anchors) == reps.set_union(tr.centers));
    const double r_max = max_projection_radius(ds, reps, tr.centers);
    double mean = 0.0;
    for (std::size_t k = 0; k < tr.anchors.size(); ++k) {
      const double direct = weighted_area(clothes_line(ds, st.scores, ds.row(tr.anchors[k])), r_max);
      CHECK(tr.areas[k] == direct);
      mean += tr.areas[k];
    }
    mean /= static_cast<double>(tr.anchors.size());
    CHECK(tr.area_mean == doctest::Approx(mean).epsilon(1e-12));
    for (std::size_t k = 0; k < tr.anchors.size(); ++k) {
      if (reps.contains(tr.anchors[k])) {
        CHECK(tr.candidates.contains(tr.anchors[k]) == (tr.areas[k] > tr.area_mean));
      }
    }
  }
}

TEST_CASE("accumulated pruning only grows") {
  Rng data(12);
  std::vector<std::vector<double>> extra = micro_cluster(data, 6, 0, 10, 0.1);
  const Dataset ds = blob_plus(data, 200, 1.0, extra);
  Dmca0Config cfg;
  cfg.psi = 16;
  cfg.accumulate_pruning = true;
  Dmca0State st = Dmca0State::initial(ds, IndexSet::range(ds.size()));
  Rng rng(13);
  std::vector<bool> prev = st.pruned;
  std::size_t prev_clean = st.clean.size();
  for (int t = 0; t < 30; ++t) {
    dmca0_step(st, ds, cfg, rng);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (prev[i]) CHECK(st.pruned[i]);
    }
    CHECK(st.clean.size() <= prev_clean);
    prev = st.pruned;
    prev_clean = st.clean.size();
  }
}

TEST_CASE("non-accumulating pruning keeps the clean set inside the base set") {
  Rng data(14);
  const Dataset ds = blob_plus(data, 100, 1.0, micro_cluster(data, 6, 0, 10, 0.1));
  const IndexSet base = IndexSet::range(100);
  Dmca0Config cfg;
  cfg.psi = 8;
  Dmca0State st = Dmca0State::initial(ds, base);
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    StepTrace tr;
    const IndexSet before = st.clean;
    const IterationDiagnostics d = dmca0_step(st, ds, cfg, rng, nullptr, PruningMode::kClothesLine, &tr);
    CHECK(st.clean == (d.frozen ? before : base.set_difference(tr.newly_pruned)));
  }
}

TEST_CASE("flat-line separation: a planted cluster's representative outscores blob anchors") {
  // Well-averaged scores, centers from the blob plus one cluster member, H
  // from maximin over the top-p. The premise concerns the cluster's flat
  // segment, so instances where r_max cuts that segment short are skipped.
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng data(100 + seed);
    const Dataset ds = blob_plus(data, 300, 1.0, micro_cluster(data, 9, 0, 10, 0.1));
    Rng rng(seed);
    const ScoreVector s = inne_ensemble(ds, ds, 16, 100, rng);
    const IndexSet centers =
        subsample_without_replacement(rng, 300, 15).set_union(IndexSet{300 + rng.uniform_index(10)});
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    order.resize(default_checkpoints(ds.size()));
    const IndexSet reps = IndexSet::from_unsorted(maximin_sample(ds, IndexSet::from_unsorted(order), s).selected);
    const double r_max = max_projection_radius(ds, reps, centers);

    std::optional<std::size_t> rep;
    for (std::size_t h : reps) {
      if (h >= 300) rep = h;
    }
    if (!rep) continue;
    double segment = 0.0;
    for (std::size_t j = 300; j < 310; ++j) segment = std::max(segment, oracle::dist(ds.row(*rep), ds.row(j)));
    if (r_max < segment) continue;

    const double cluster_area = weighted_area(clothes_line(ds, s, ds.row(*rep)), r_max);
    for (std::size_t a : reps.set_union(centers)) {
      if (a < 300) CHECK(cluster_area > weighted_area(clothes_line(ds, s, ds.row(a)), r_max));
    }
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("prune_top_score with one iteration equals dmca0 with one iteration") {
  Rng data(16);
  const Dataset ds = blob_plus(data, 60, 1.0, {{10, 10}});
  Dmca0Config cfg;
  cfg.psi = 61;
  cfg.iterations = 1;
  cfg.seed = 4;
  const Dmca0Result a = run_prune_top_score(ds, cfg);
  const Dmca0Result b = run_dmca0(ds, cfg);
  CHECK(a.scores == b.scores);
  CHECK(a.clusters.empty());
  CHECK(a.graph.empty());

  cfg.iterations = 5;
  cfg.checkpoints = 1;
  const Dmca0Result c = run_prune_top_score(ds, cfg);
  CHECK(c.clusters.empty());
  CHECK_FALSE(c.final_clean.contains(60));
}

TEST_CASE("dmca0 and dmca are deterministic per seed") {
  Rng data(17);
  const Dataset ds = blob_plus(data, 120, 1.0, micro_cluster(data, 6, 1, 8, 0.1));
  Dmca0Config c0;
  c0.psi = 8;
  c0.iterations = 15;
  c0.seed = 3;
  const Dmca0Result a = run_dmca0(ds, c0), b = run_dmca0(ds, c0);
  CHECK(a.scores == b.scores);
  CHECK(a.clusters == b.clusters);
  CHECK(a.graph == b.graph);

  DmcaConfig c;
  c.psi_max = 8;
  c.iterations = 10;
  c.seed = 3;
  const DmcaResult x = run_dmca(ds, c);
  c.threads = 3;
  const DmcaResult y = run_dmca(ds, c);
  CHECK(x.scores == y.scores);
  CHECK(x.clusters == y.clusters);
  CHECK(x.graph == y.graph);
  for (double s : x.scores) CHECK((s >= 0.0 && s <= 1.0));
}

TEST_CASE("initial clean set without a planted cluster gives zero masking for it") {
  Rng data(18);
  const Dataset ds = blob_plus(data, 100, 1.0, micro_cluster(data, 6, 0, 10, 0.1));
  std::vector<int> labels(110, 0);
  for (std::size_t i = 100; i < 110; ++i) labels[i] = 1;
  const GroundTruth truth(labels);
  Dmca0Config cfg;
  cfg.psi = 16;
  cfg.iterations = 20;
  const Dmca0Result r = run_dmca0(ds, cfg, IndexSet::range(100), &truth);
  CHECK(r.masking.per_iteration.size() == 20);
  CHECK(r.masking.total() == 0);
  CHECK(r.scores.size() == 110);
}

TEST_CASE("minimal dmca: t = 2, psi_max = 2") {
  Rng data(19);
  const Dataset ds = blob_plus(data, 30, 1.0, {{9, 9}});
  DmcaConfig cfg;
  cfg.psi_max = 2;
  cfg.iterations = 2;
  const DmcaResult r = run_dmca(ds, cfg);
  CHECK(r.psi_schedule == std::vector<std::size_t>{2});
  REQUIRE(r.diagnostics.size() == 2);
  CHECK(r.diagnostics[0].phase == 1);
  CHECK(r.diagnostics[1].phase == 2);
  CHECK(r.diagnostics[1].psi == 2);
  CHECK(r.scores.size() == 31);
  CHECK_THROWS_AS(run_dmca(ds, DmcaConfig{.psi_max = 2, .iterations = 1}), InvalidArgument);
}

TEST_CASE("warm-up removes planted clusters before phase 2") {
  Rng data(20);
  std::vector<std::vector<double>> extra = micro_cluster(data, 7, 0, 10, 0.1);
  for (auto& r : micro_cluster(data, -5, 6, 10, 0.1)) extra.push_back(r);
  const Dataset ds = blob_plus(data, 300, 1.2, extra);
  DmcaConfig cfg;
  cfg.psi_max = 16;
  cfg.seed = 1;
  const DmcaResult r = run_dmca(ds, cfg);
  for (std::size_t i = 300; i < 320; ++i) CHECK_FALSE(r.phase2_clean.contains(i));
  CHECK(r.phase2_clean.size() >= 250);
  // Warm-up member i runs i iterations.
  std::size_t warm = 0;
  for (const auto& d : r.diagnostics) warm += d.phase == 1;
  CHECK(warm == 50 * 51 / 2);
}

}  // TEST_SUITE
