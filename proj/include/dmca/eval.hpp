#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dmca/clusters.hpp"
#include "dmca/core.hpp"

namespace dmca {

// Probability that a random (outlier, inlier) pair is ordered correctly, ties
// counting one half. Scattered and clustered outliers are both positives.
// Empty when either class is absent.
std::optional<double> roc_auc(const ScoreVector& scores, const GroundTruth& truth);

// Mean precision at the rank of each outlier, ranking by descending score with
// ties broken by lower index. Empty when there are no outliers.
std::optional<double> average_precision(const ScoreVector& scores, const GroundTruth& truth);

enum class Matching {
  kBestMatch,  // each true cluster takes its best predicted cluster
  kHungarian,  // one-to-one assignment maximizing total F1
};

std::optional<Matching> parse_matching(std::string_view name);
const char* matching_name(Matching m);

struct ClusterMatch {
  int true_cluster = 0;                  // label k >= 1
  std::optional<std::size_t> predicted;  // index into MicroClusterSet::clusters
  double f1 = 0.0;
};

struct AssignmentScore {
  double avg_f1 = 0.0;
  std::vector<ClusterMatch> per_true_cluster;
};

// Empty when the ground truth has no micro-clusters. Scattered outliers are
// ignored.
std::optional<AssignmentScore> assignment_f1(const MicroClusterSet& predicted,
                                             const GroundTruth& truth,
                                             Matching matching = Matching::kBestMatch);

// Number of true micro-clusters with at least two members in the subsample.
std::size_t count_masking(const IndexSet& subsample, const GroundTruth& truth);

struct MaskingLog {
  std::vector<std::size_t> per_iteration;
  std::vector<std::size_t> cumulative;

  void record(std::size_t count) {
    per_iteration.push_back(count);
    cumulative.push_back((cumulative.empty() ? 0 : cumulative.back()) + count);
  }
  std::size_t total() const { return cumulative.empty() ? 0 : cumulative.back(); }
};

// Maximum-weight one-to-one assignment on a rows x cols benefit matrix
// (row-major). Returns, per row, the assigned column or cols when unassigned.
std::vector<std::size_t> max_weight_assignment(const std::vector<double>& benefit,
                                               std::size_t rows, std::size_t cols);

}  // namespace dmca
