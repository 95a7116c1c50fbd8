#include "dmca/dmca.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "dmca/errors.hpp"
#include "dmca/peaks.hpp"
#include "dmca/sampling.hpp"

namespace dmca {

std::size_t default_checkpoints(std::size_t n, double p_frac) {
  if (!(p_frac > 0.0) || p_frac > 1.0) {
    throw InvalidArgument("p-frac must lie in (0, 1]");
  }
  const auto p = static_cast<std::size_t>(std::ceil(p_frac * static_cast<double>(n)));
  return std::clamp<std::size_t>(p, 1, n);
}

ClothesLine clothes_line(const Dataset& ds, const ScoreVector& scores,
                         std::span<const double> anchor) {
  if (scores.size() != ds.size()) {
    throw ContractViolation("clothes_line: scores length does not match dataset");
  }
  const std::vector<double> dist = distances_to(ds, anchor);
  ClothesLine line;
  line.order.resize(ds.size());
  std::iota(line.order.begin(), line.order.end(), std::size_t{0});
  std::sort(line.order.begin(), line.order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  line.distances.resize(ds.size());
  line.running_mean.resize(ds.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t p = line.order[i];
    line.distances[i] = dist[p];
    sum += scores[p];
    line.running_mean[i] = sum / static_cast<double>(i + 1);
  }
  return line;
}

double weighted_area(const ClothesLine& line, double r_max) {
  if (r_max < 0.0) throw InvalidArgument("weighted_area: r_max must be >= 0");
  const auto& L = line.distances;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < L.size() && L[i] <= r_max; ++i) {
    const double w = 0.5 * (L[i + 1] + L[i]);
    area += w * (L[i + 1] - L[i]) * line.running_mean[i];
  }
  return area;
}

double max_projection_radius(const Dataset& ds, const IndexSet& reps,
                             const IndexSet& centers) {
  if (reps.empty() || centers.empty()) {
    throw InvalidArgument("max_projection_radius: empty representative or center set");
  }
  double r = 0.0;
  for (std::size_t x : reps) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t c : centers) nearest = std::min(nearest, euclidean(ds.row(x), ds.row(c)));
    r = std::max(r, nearest);
  }
  return r;
}

Dmca0State Dmca0State::initial(const Dataset& ds, IndexSet clean) {
  if (!clean.within(ds.size())) throw InvalidArgument("clean set index out of range");
  if (clean.size() < 2) throw InvalidArgument("clean set needs at least 2 points");
  Dmca0State s;
  s.scores.assign(ds.size(), 0.0);
  s.graph = NeighborGraph(ds.size());
  s.base = clean;
  s.clean = std::move(clean);
  s.pruned.assign(ds.size(), false);
  return s;
}

namespace {

IndexSet top_scoring(const ScoreVector& scores, std::size_t p) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  p = std::min(p, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(p), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  idx.resize(p);
  return IndexSet::from_unsorted(std::move(idx));
}

// weighted_area(clothes_line(ds, scores, row(anchor)), r_max) without sorting
// the points beyond r_max.
double anchor_area(const Dataset& ds, const ScoreVector& scores, std::size_t anchor,
                   double r_max, std::vector<std::pair<double, std::size_t>>& scratch) {
  const std::size_t n = ds.size();
  const auto x = ds.row(anchor);
  scratch.resize(n);
  for (std::size_t j = 0; j < n; ++j) scratch[j] = {euclidean(x, ds.row(j)), j};
  const auto inside = std::partition(scratch.begin(), scratch.end(),
                                     [r_max](const auto& e) { return e.first <= r_max; });
  std::sort(scratch.begin(), inside);
  const auto count = static_cast<std::size_t>(inside - scratch.begin());
  if (inside != scratch.end()) {
    std::iter_swap(inside, std::min_element(inside, scratch.end()));
  }
  double area = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
    sum += scores[scratch[i].second];
    const double mean = sum / static_cast<double>(i + 1);
    const double lo = scratch[i].first;
    const double hi = scratch[i + 1].first;
    area += 0.5 * (hi + lo) * (hi - lo) * mean;
  }
  return area;
}

void validate(const Dataset& ds, const Dmca0Config& cfg) {
  if (cfg.psi < 2) throw InvalidArgument("psi must be >= 2");
  if (cfg.iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (cfg.checkpoints > ds.size()) throw InvalidArgument("p must not exceed n");
}

}  // namespace

IterationDiagnostics dmca0_step(Dmca0State& state, const Dataset& ds,
                                const Dmca0Config& cfg, Rng& rng, const GroundTruth* truth,
                                PruningMode mode, StepTrace* trace) {
  validate(ds, cfg);
  const std::size_t n = ds.size();
  if (state.scores.size() != n) throw ContractViolation("state does not match dataset");
  const std::size_t p = cfg.checkpoints == 0 ? default_checkpoints(n) : cfg.checkpoints;

  IterationDiagnostics diag;
  diag.iteration = ++state.iteration;
  diag.clean_size = state.clean.size();

  std::size_t psi = cfg.psi;
  if (psi > state.clean.size()) {
    if (!state.clamp_warned) {
      log_warning("psi " + std::to_string(psi) + " exceeds clean set size " +
                  std::to_string(state.clean.size()) + "; clamping");
      state.clamp_warned = true;
    }
    psi = state.clean.size();
  }
  diag.psi = psi;

  const HypersphereModel model = fit_hyperspheres(ds, state.clean, psi, rng);
  const ScoreVector round = score_hyperspheres(model, ds);
  const auto i = static_cast<double>(state.iteration);
  for (std::size_t j = 0; j < n; ++j) {
    state.scores[j] = (state.scores[j] * (i - 1.0) + round[j]) / i;
  }
  if (truth != nullptr) diag.masking = count_masking(model.centers, *truth);

  const IndexSet top = top_scoring(state.scores, p);
  diag.top_size = top.size();
  if (trace != nullptr) {
    *trace = StepTrace{};
    trace->round_scores = round;
    trace->centers = model.centers;
    trace->top = top;
  }

  std::vector<std::size_t> newly_pruned;
  if (mode == PruningMode::kTopScore) {
    newly_pruned = top.indices();
  } else {
    const MaximinTrace mm = maximin_sample(ds, top, state.scores, cfg.stop_ratio);
    const IndexSet reps = IndexSet::from_unsorted(mm.selected);
    diag.representatives = reps.size();
    const double r_max = max_projection_radius(ds, reps, model.centers);
    diag.r_max = r_max;

    const IndexSet anchors = reps.set_union(model.centers);
    std::vector<double> areas(anchors.size());
    std::vector<std::pair<double, std::size_t>> scratch;
    double area_sum = 0.0;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      areas[k] = anchor_area(ds, state.scores, anchors[k], r_max, scratch);
      area_sum += areas[k];
    }
    const double area_mean = area_sum / static_cast<double>(anchors.size());

    std::vector<std::size_t> candidates;
    for (std::size_t r = 0, k = 0; r < reps.size(); ++r) {
      while (anchors[k] != reps[r]) ++k;
      if (areas[k] > area_mean) candidates.push_back(reps[r]);
    }
    diag.candidates = candidates.size();

    for (std::size_t x : candidates) {
      const ClothesLine line = clothes_line(ds, state.scores, ds.row(x));
      std::vector<std::size_t> neighbors;
      std::size_t window = line.distances.size();
      if (cfg.gap_within_r_max) {
        window = static_cast<std::size_t>(
            std::upper_bound(line.distances.begin(), line.distances.end(), r_max) -
            line.distances.begin());
        window = std::min(window + 1, line.distances.size());
      }
      if (window >= 2) {
        const double tau =
            find_first_gap(std::span(line.distances).first(window), cfg.peak_sigma).threshold;
        for (std::size_t q = 0; q < line.distances.size() && line.distances[q] < tau; ++q) {
          neighbors.push_back(line.order[q]);
        }
      }
      const IndexSet nbrs = IndexSet::from_unsorted(std::move(neighbors));
      state.graph.bump_edges(x, nbrs);
      newly_pruned.push_back(x);
      newly_pruned.insert(newly_pruned.end(), nbrs.begin(), nbrs.end());
    }

    if (trace != nullptr) {
      trace->representatives = mm.selected;
      trace->anchors = anchors.indices();
      trace->areas = areas;
      trace->area_mean = area_mean;
      trace->candidates = IndexSet(candidates);
    }
  }

  const bool accumulate = mode == PruningMode::kClothesLine && cfg.accumulate_pruning;
  if (!accumulate) std::fill(state.pruned.begin(), state.pruned.end(), false);
  for (std::size_t x : newly_pruned) state.pruned[x] = true;
  if (!(accumulate && state.frozen)) {
    std::vector<std::size_t> next;
    for (std::size_t j : state.base) {
      if (!state.pruned[j]) next.push_back(j);
    }
    if (next.size() >= 2) {
      state.clean = IndexSet(std::move(next));
      state.frozen = false;
    } else {
      state.frozen = true;
      log_warning("clean set would drop below 2 points at iteration " +
                  std::to_string(state.iteration) + "; keeping the previous one");
    }
  }
  diag.pruned_total = static_cast<std::size_t>(
      std::count(state.pruned.begin(), state.pruned.end(), true));
  diag.frozen = state.frozen;
  if (trace != nullptr) trace->newly_pruned = IndexSet::from_unsorted(newly_pruned);
  return diag;
}

namespace {

Dmca0Result run_sequential(const Dataset& ds, const Dmca0Config& cfg,
                           const std::optional<IndexSet>& initial_clean,
                           const GroundTruth* truth, PruningMode mode) {
  validate(ds, cfg);
  if (truth != nullptr && truth->size() != ds.size()) {
    throw ContractViolation("ground truth length does not match dataset");
  }
  Dmca0State state =
      Dmca0State::initial(ds, initial_clean ? *initial_clean : IndexSet::range(ds.size()));
  Rng rng(cfg.seed);
  Dmca0Result result;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    IterationDiagnostics diag = dmca0_step(state, ds, cfg, rng, truth, mode);
    if (diag.masking) result.masking.record(*diag.masking);
    result.diagnostics.push_back(diag);
  }
  result.scores = std::move(state.scores);
  if (mode == PruningMode::kClothesLine) {
    result.clusters = find_clusters(state.graph, {cfg.tau_e_distinct, cfg.peak_sigma, cfg.tau_e_log});
  }
  result.graph = std::move(state.graph);
  result.final_clean = std::move(state.clean);
  return result;
}

}  // namespace

Dmca0Result run_dmca0(const Dataset& ds, const Dmca0Config& cfg,
                      const std::optional<IndexSet>& initial_clean,
                      const GroundTruth* truth) {
  return run_sequential(ds, cfg, initial_clean, truth, PruningMode::kClothesLine);
}

Dmca0Result run_prune_top_score(const Dataset& ds, const Dmca0Config& cfg,
                                const GroundTruth* truth) {
  return run_sequential(ds, cfg, std::nullopt, truth, PruningMode::kTopScore);
}

std::vector<std::size_t> warmup_psi_schedule(std::size_t psi_max, std::size_t count) {
  if (psi_max < 2) throw InvalidArgument("psi_max must be >= 2");
  std::vector<std::size_t> out;
  if (count == 0) return out;
  if (count == 1) return {2};
  const double span = static_cast<double>(psi_max - 2);
  for (std::size_t k = 0; k < count; ++k) {
    const double v = 2.0 + span * static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back(static_cast<std::size_t>(std::llround(v)));
  }
  return out;
}

DmcaResult run_dmca(const Dataset& ds, const DmcaConfig& cfg, const GroundTruth* truth) {
  if (cfg.psi_max < 2) throw InvalidArgument("psi_max must be >= 2");
  if (cfg.iterations < 2) throw InvalidArgument("D.MCA needs iterations >= 2");
  if (truth != nullptr && truth->size() != ds.size()) {
    throw ContractViolation("ground truth length does not match dataset");
  }
  const std::size_t n = ds.size();
  const std::size_t warmup_count = cfg.iterations / 2;
  const Rng root(cfg.seed);

  DmcaResult result;
  result.psi_schedule = warmup_psi_schedule(cfg.psi_max, warmup_count);

  auto member_config = [&](std::size_t psi, std::size_t iterations, std::uint64_t seed) {
    Dmca0Config c;
    c.psi = psi;
    c.iterations = iterations;
    c.checkpoints = cfg.checkpoints;
    c.stop_ratio = cfg.stop_ratio;
    c.peak_sigma = cfg.peak_sigma;
    c.tau_e_distinct = cfg.tau_e_distinct;
    c.tau_e_log = cfg.tau_e_log;
    c.accumulate_pruning = cfg.accumulate_pruning;
    c.gap_within_r_max = cfg.gap_within_r_max;
    c.seed = seed;
    return c;
  };

  std::vector<Dmca0Result> members(warmup_count);
  auto run_member = [&](std::size_t m) {
    const Dmca0Config c = member_config(result.psi_schedule[m],
                                        cfg.warmup_flat ? 1 : m + 1,
                                        root.split(m + 1).seed());
    members[m] = run_dmca0(ds, c, std::nullopt, truth);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, warmup_count));
  if (threads <= 1) {
    for (std::size_t m = 0; m < warmup_count; ++m) run_member(m);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t m = next++; m < warmup_count; m = next++) run_member(m);
      });
    }
  }

  NeighborGraph graph(n);
  for (std::size_t m = 0; m < warmup_count; ++m) {
    graph.merge(members[m].graph);
    for (IterationDiagnostics d : members[m].diagnostics) {
      d.phase = 1;
      d.member = m + 1;
      result.diagnostics.push_back(d);
    }
    if (!members[m].masking.per_iteration.empty()) {
      result.masking.record(members[m].masking.per_iteration.back());
    }
  }
  const FindClustersOptions fc{cfg.tau_e_distinct, cfg.peak_sigma, cfg.tau_e_log};
  result.warmup_clusters = find_clusters(graph, fc);

  std::vector<std::size_t> excluded;
  for (const auto& c : result.warmup_clusters.clusters) {
    excluded.insert(excluded.end(), c.begin(), c.end());
  }
  IndexSet clean = IndexSet::range(n).set_difference(IndexSet::from_unsorted(excluded));
  if (clean.size() < 2) {
    log_warning("warm-up clusters cover all but " + std::to_string(clean.size()) +
                " points; phase 2 trains on the full dataset");
    clean = IndexSet::range(n);
  }
  result.phase2_clean = clean;

  const Dmca0Result phase2 =
      run_dmca0(ds, member_config(cfg.psi_max, cfg.iterations - warmup_count, root.split(0).seed()),
                clean, truth);
  for (IterationDiagnostics d : phase2.diagnostics) {
    d.phase = 2;
    result.diagnostics.push_back(d);
    if (d.masking) result.masking.record(*d.masking);
  }
  graph.merge(phase2.graph);
  result.clusters = find_clusters(graph, fc);
  result.graph = std::move(graph);
  result.scores = phase2.scores;
  return result;
}

}  // namespace dmca
