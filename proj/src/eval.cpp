#include "dmca/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dmca/errors.hpp"

namespace dmca {

namespace {

void check_lengths(const ScoreVector& scores, const GroundTruth& truth) {
  if (scores.size() != truth.size()) {
    throw ContractViolation("scores and labels have different lengths");
  }
}

double f1_overlap(const IndexSet& a, const IndexSet& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

}  // namespace

std::optional<double> roc_auc(const ScoreVector& scores, const GroundTruth& truth) {
  check_lengths(scores, truth);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives, kept doubled so
  // every quantity stays integral.
  std::uint64_t rank_sum_x2 = 0;
  std::uint64_t positives = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const std::uint64_t avg_rank_x2 = lo + 1 + hi;  // (lo+1) + hi
    for (std::size_t k = lo; k < hi; ++k) {
      if (truth.is_outlier(order[k])) {
        rank_sum_x2 += avg_rank_x2;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const std::uint64_t u_x2 = rank_sum_x2 - positives * (positives + 1);
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::optional<double> average_precision(const ScoreVector& scores,
                                        const GroundTruth& truth) {
  check_lengths(scores, truth);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (truth.is_outlier(order[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

std::optional<Matching> parse_matching(std::string_view name) {
  if (name == "best") return Matching::kBestMatch;
  if (name == "hungarian") return Matching::kHungarian;
  return std::nullopt;
}

const char* matching_name(Matching m) {
  return m == Matching::kBestMatch ? "best" : "hungarian";
}

std::vector<std::size_t> max_weight_assignment(const std::vector<double>& benefit,
                                               std::size_t rows, std::size_t cols) {
  // Hungarian algorithm (potentials form) on a square cost matrix padded with
  // zero-benefit entries; cost = -benefit.
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> result(rows, cols);
  if (n == 0) return result;
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? -benefit[i * cols + j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols) result[i] = j - 1;
  }
  return result;
}

std::optional<AssignmentScore> assignment_f1(const MicroClusterSet& predicted,
                                             const GroundTruth& truth, Matching matching) {
  const auto& true_clusters = truth.clusters();
  if (true_clusters.empty()) return std::nullopt;
  const std::size_t m = true_clusters.size();
  const std::size_t k = predicted.size();

  std::vector<double> f1(m * k);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      f1[a * k + b] = f1_overlap(true_clusters[a], predicted.clusters[b]);
    }
  }

  AssignmentScore score;
  if (matching == Matching::kBestMatch) {
    for (std::size_t a = 0; a < m; ++a) {
      ClusterMatch match{static_cast<int>(a + 1), std::nullopt, 0.0};
      for (std::size_t b = 0; b < k; ++b) {
        if (f1[a * k + b] > match.f1) {
          match.predicted = b;
          match.f1 = f1[a * k + b];
        }
      }
      score.per_true_cluster.push_back(match);
    }
  } else {
    const auto assigned = max_weight_assignment(f1, m, k);
    for (std::size_t a = 0; a < m; ++a) {
      ClusterMatch match{static_cast<int>(a + 1), std::nullopt, 0.0};
      if (assigned[a] < k && f1[a * k + assigned[a]] > 0.0) {
        match.predicted = assigned[a];
        match.f1 = f1[a * k + assigned[a]];
      }
      score.per_true_cluster.push_back(match);
    }
  }
  double total = 0.0;
  for (const auto& c : score.per_true_cluster) total += c.f1;
  score.avg_f1 = total / static_cast<double>(m);
  return score;
}

std::size_t count_masking(const IndexSet& subsample, const GroundTruth& truth) {
  std::vector<std::size_t> hits(truth.num_clusters(), 0);
  for (std::size_t i : subsample) {
    if (i >= truth.size()) throw InvalidArgument("count_masking: index out of range");
    const int label = truth.label(i);
    if (label > 0) ++hits[static_cast<std::size_t>(label - 1)];
  }
  return static_cast<std::size_t>(
      std::count_if(hits.begin(), hits.end(), [](std::size_t h) { return h >= 2; }));
}

}  // namespace dmca
