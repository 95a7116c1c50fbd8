#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "dmca/rng.hpp"

namespace dmca {

// Sorted, duplicate-free list of point indices.
class IndexSet {
 public:
  using const_iterator = std::vector<std::size_t>::const_iterator;

  IndexSet() = default;
  // Requires strictly increasing input.
  explicit IndexSet(std::vector<std::size_t> sorted_indices);
  IndexSet(std::initializer_list<std::size_t> indices);

  // Sorts and removes duplicates.
  static IndexSet from_unsorted(std::vector<std::size_t> indices);
  static IndexSet range(std::size_t n);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }
  const_iterator begin() const { return indices_.begin(); }
  const_iterator end() const { return indices_.end(); }
  const std::vector<std::size_t>& indices() const { return indices_; }

  bool contains(std::size_t index) const;
  // True when every index is < n.
  bool within(std::size_t n) const { return indices_.empty() || indices_.back() < n; }

  IndexSet set_union(const IndexSet& other) const;
  IndexSet set_difference(const IndexSet& other) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

// n x d matrix of finite coordinates, stored row-major. Row index is point
// identity.
class Dataset {
 public:
  Dataset(std::size_t n, std::size_t d, std::vector<double> values);
  static Dataset from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  std::span<const double> values() const { return values_; }

  Dataset subset(const IndexSet& rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
};

// Per-point outlier scores; the larger, the more anomalous. Every entry lies in
// [0, 1] for scores produced by this library.
using ScoreVector = std::vector<double>;

// 0 = inlier, -1 = scattered outlier, k >= 1 = member of micro-cluster k.
class GroundTruth {
 public:
  static constexpr int kInlier = 0;
  static constexpr int kScattered = -1;

  // Throws ValidationError unless positive labels form 1..m and every label is
  // >= -1.
  explicit GroundTruth(std::vector<int> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  bool is_outlier(std::size_t i) const { return labels_[i] != kInlier; }
  std::size_t num_clusters() const { return clusters_.size(); }
  std::size_t num_outliers() const;

  // clusters()[k - 1] holds the members of micro-cluster k.
  const std::vector<IndexSet>& clusters() const { return clusters_; }
  IndexSet scattered() const;

  friend bool operator==(const GroundTruth& a, const GroundTruth& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<int> labels_;
  std::vector<IndexSet> clusters_;
};

double euclidean(std::span<const double> a, std::span<const double> b);

// Distance from x to every row of ds, in row order.
std::vector<double> distances_to(const Dataset& ds, std::span<const double> x);

// psi distinct indices drawn uniformly from [0, n) (Floyd's algorithm).
IndexSet subsample_without_replacement(Rng& rng, std::size_t n, std::size_t psi);

enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };
void set_log_level(LogLevel level);
LogLevel log_level();
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace dmca
