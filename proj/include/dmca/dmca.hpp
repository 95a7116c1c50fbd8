#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmca/clusters.hpp"
#include "dmca/core.hpp"
#include "dmca/eval.hpp"
#include "dmca/inne.hpp"
#include "dmca/rng.hpp"

namespace dmca {

// Check-point count p = ceil(p_frac * n), clamped to [1, n].
std::size_t default_checkpoints(std::size_t n, double p_frac = 0.1);

struct Dmca0Config {
  std::size_t psi = 16;
  std::size_t iterations = 100;
  std::size_t checkpoints = 0;  // p; 0 selects default_checkpoints(n)
  double stop_ratio = 0.5;      // maximin early stop
  double peak_sigma = 3.0;      // gap / drop detector
  bool tau_e_distinct = true;   // FindClusters uses distinct weights
  bool tau_e_log = true;        // FindClusters searches log weights
  // When false the pruning set restarts empty every iteration, so the clean
  // set is the initial one minus this iteration's pruned points. When true it
  // accumulates.
  bool accumulate_pruning = false;
  // Search for the neighbor gap only among distances up to r_max (plus the
  // first point beyond it) instead of the whole clothes-line.
  bool gap_within_r_max = true;
  std::uint64_t seed = 0;
};

// Cumulative-mean neighbor scores around an anchor, by increasing distance.
struct ClothesLine {
  std::vector<double> distances;     // ascending
  std::vector<std::size_t> order;    // point at each position (ties: lower index)
  std::vector<double> running_mean;  // mean score of the first i+1 points
};

ClothesLine clothes_line(const Dataset& ds, const ScoreVector& scores,
                         std::span<const double> anchor);

// Distance-weighted area under the clothes-line up to r_max:
// sum over i with L_i <= r_max of (L_{i+1}^2 - L_i^2) / 2 * a_i.
double weighted_area(const ClothesLine& line, double r_max);

// max over reps of the distance to the nearest center. Both must be non-empty.
double max_projection_radius(const Dataset& ds, const IndexSet& reps,
                             const IndexSet& centers);

enum class PruningMode {
  kClothesLine,  // filter representatives by weighted area, prune their neighbors
  kTopScore,     // prune the p highest-scoring points of the previous iteration
};

struct IterationDiagnostics {
  int phase = 0;            // 0 standalone, 1 warm-up, 2 final sequential run
  std::size_t member = 0;   // warm-up member (1-based), 0 otherwise
  std::size_t iteration = 0;
  std::size_t psi = 0;      // effective subsample size
  std::size_t clean_size = 0;
  std::size_t top_size = 0;
  std::size_t representatives = 0;
  std::size_t candidates = 0;
  std::size_t pruned_total = 0;
  double r_max = 0.0;
  bool frozen = false;
  std::optional<std::size_t> masking;
};

struct Dmca0State {
  ScoreVector scores;
  NeighborGraph graph;
  IndexSet base;   // initial clean set; pruning removes points from it
  IndexSet clean;
  std::vector<bool> pruned;
  std::size_t iteration = 0;
  bool frozen = false;
  bool clamp_warned = false;

  static Dmca0State initial(const Dataset& ds, IndexSet clean);
};

// Intermediate values of one step, for inspection and tests.
struct StepTrace {
  ScoreVector round_scores;
  IndexSet centers;
  IndexSet top;
  std::vector<std::size_t> representatives;  // maximin order
  std::vector<std::size_t> anchors;          // representatives plus centers
  std::vector<double> areas;                 // parallel to anchors
  double area_mean = 0.0;
  IndexSet candidates;
  IndexSet newly_pruned;
};

IterationDiagnostics dmca0_step(Dmca0State& state, const Dataset& ds,
                                const Dmca0Config& cfg, Rng& rng,
                                const GroundTruth* truth = nullptr,
                                PruningMode mode = PruningMode::kClothesLine,
                                StepTrace* trace = nullptr);

struct Dmca0Result {
  ScoreVector scores;
  MicroClusterSet clusters;
  NeighborGraph graph;
  IndexSet final_clean;
  std::vector<IterationDiagnostics> diagnostics;
  MaskingLog masking;  // filled when ground truth is supplied
};

// Sequential ensemble. Training starts from initial_clean (all points when
// absent); every point is scored.
Dmca0Result run_dmca0(const Dataset& ds, const Dmca0Config& cfg,
                      const std::optional<IndexSet>& initial_clean = std::nullopt,
                      const GroundTruth* truth = nullptr);

// Ablation: pruning keeps only the top-p scoring points out of training and
// never updates the graph.
Dmca0Result run_prune_top_score(const Dataset& ds, const Dmca0Config& cfg,
                                const GroundTruth* truth = nullptr);

struct DmcaConfig {
  std::size_t psi_max = 16;
  std::size_t iterations = 100;
  std::size_t checkpoints = 0;
  double stop_ratio = 0.5;
  double peak_sigma = 3.0;
  bool tau_e_distinct = true;
  bool tau_e_log = true;
  bool warmup_flat = false;  // each warm-up member runs a single iteration
  bool accumulate_pruning = false;
  bool gap_within_r_max = true;
  std::uint64_t seed = 0;
  std::size_t threads = 1;   // warm-up members run concurrently
};

// count values evenly spaced on [2, psi_max], rounded to integers.
std::vector<std::size_t> warmup_psi_schedule(std::size_t psi_max, std::size_t count);

struct DmcaResult {
  ScoreVector scores;
  MicroClusterSet clusters;
  MicroClusterSet warmup_clusters;
  NeighborGraph graph;
  IndexSet phase2_clean;
  std::vector<std::size_t> psi_schedule;
  std::vector<IterationDiagnostics> diagnostics;  // warm-up members then phase 2
  // One entry per model: the last iteration of each warm-up member followed
  // by every phase-2 iteration.
  MaskingLog masking;
};

DmcaResult run_dmca(const Dataset& ds, const DmcaConfig& cfg,
                    const GroundTruth* truth = nullptr);

}  // namespace dmca
