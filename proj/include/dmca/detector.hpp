#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dmca/clusters.hpp"
#include "dmca/core.hpp"
#include "dmca/dmca.hpp"
#include "dmca/eval.hpp"

namespace dmca {

enum class Algorithm { kDmca, kDmca0, kInne, kPruneTopScore };

std::optional<Algorithm> parse_algorithm(std::string_view name);
const char* algorithm_name(Algorithm a);

// Flat configuration covering every algorithm; psi is psi_max for kDmca.
struct DetectConfig {
  Algorithm algorithm = Algorithm::kDmca;
  std::size_t psi = 16;
  std::size_t iterations = 100;
  double p_frac = 0.1;
  double stop_ratio = 0.5;
  double peak_sigma = 3.0;
  bool tau_e_distinct = true;
  bool tau_e_log = true;
  bool accumulate_pruning = false;
  bool gap_within_r_max = true;
  bool warmup_flat = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct DetectOutput {
  ScoreVector scores;
  MicroClusterSet clusters;
  std::vector<IterationDiagnostics> diagnostics;
  MaskingLog masking;  // filled when ground truth is supplied
};

// Runs the configured algorithm. For kInne, psi is clamped to n and
// diagnostics hold one entry per ensemble member.
DetectOutput run_detector(const Dataset& ds, const DetectConfig& cfg,
                          const GroundTruth* truth = nullptr);

}  // namespace dmca
