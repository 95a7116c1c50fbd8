#include "dmca/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <set>
#include <string>

#include "dmca/errors.hpp"

namespace dmca {

IndexSet::IndexSet(std::vector<std::size_t> sorted_indices)
    : indices_(std::move(sorted_indices)) {
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i - 1] >= indices_[i]) {
      throw InvalidArgument("IndexSet: indices must be strictly increasing");
    }
  }
}

IndexSet::IndexSet(std::initializer_list<std::size_t> indices)
    : IndexSet(std::vector<std::size_t>(indices)) {}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  IndexSet out;
  out.indices_ = std::move(indices);
  return out;
}

IndexSet IndexSet::range(std::size_t n) {
  IndexSet out;
  out.indices_.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.indices_[i] = i;
  return out;
}

bool IndexSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

IndexSet IndexSet::set_union(const IndexSet& other) const {
  IndexSet out;
  out.indices_.reserve(size() + other.size());
  std::set_union(begin(), end(), other.begin(), other.end(),
                 std::back_inserter(out.indices_));
  return out;
}

IndexSet IndexSet::set_difference(const IndexSet& other) const {
  IndexSet out;
  std::set_difference(begin(), end(), other.begin(), other.end(),
                      std::back_inserter(out.indices_));
  return out;
}

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n_ == 0 || d_ == 0) throw InvalidArgument("Dataset: n and d must be >= 1");
  if (values_.size() != n_ * d_) {
    throw InvalidArgument("Dataset: value count does not match n * d");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw InvalidArgument("Dataset: non-finite coordinate at row " +
                            std::to_string(k / d_) + ", column " +
                            std::to_string(k % d_));
    }
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidArgument("Dataset: no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw InvalidArgument("Dataset: ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Dataset(rows.size(), d, std::move(values));
}

Dataset Dataset::subset(const IndexSet& rows) const {
  if (!rows.within(n_)) throw InvalidArgument("Dataset::subset: index out of range");
  std::vector<double> values;
  values.reserve(rows.size() * d_);
  for (std::size_t i : rows) {
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return Dataset(rows.size(), d_, std::move(values));
}

GroundTruth::GroundTruth(std::vector<int> labels) : labels_(std::move(labels)) {
  int max_label = 0;
  for (int l : labels_) {
    if (l < kScattered) {
      throw ValidationError("labels must be >= -1, got " + std::to_string(l));
    }
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_label));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] > 0) members[static_cast<std::size_t>(labels_[i] - 1)].push_back(i);
  }
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].empty()) {
      throw ValidationError("cluster labels must be contiguous 1..m; label " +
                            std::to_string(k + 1) + " is missing");
    }
    clusters_.emplace_back(std::move(members[k]));
  }
}

std::size_t GroundTruth::num_outliers() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](int l) { return l != kInlier; }));
}

IndexSet GroundTruth::scattered() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == kScattered) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("euclidean: dimensionality mismatch (" +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<double> distances_to(const Dataset& ds, std::span<const double> x) {
  if (x.size() != ds.dim()) {
    throw ContractViolation("distances_to: point has dimension " +
                            std::to_string(x.size()) + ", dataset has " +
                            std::to_string(ds.dim()));
  }
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out[i] = euclidean(ds.row(i), x);
  return out;
}

IndexSet subsample_without_replacement(Rng& rng, std::size_t n, std::size_t psi) {
  if (psi == 0 || psi > n) {
    throw InvalidArgument("subsample_without_replacement: need 1 <= psi <= n (psi=" +
                          std::to_string(psi) + ", n=" + std::to_string(n) + ")");
  }
  std::set<std::size_t> chosen;
  for (std::size_t j = n - psi; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return IndexSet(std::vector<std::size_t>(chosen.begin(), chosen.end()));
}

namespace {
std::atomic<int> g_log_level{static_cast<int>(LogLevel::kWarning)};
}

void set_log_level(LogLevel level) { g_log_level = static_cast<int>(level); }
LogLevel log_level() { return static_cast<LogLevel>(g_log_level.load()); }

void log_warning(std::string_view message) {
  if (g_log_level >= static_cast<int>(LogLevel::kWarning)) {
    std::clog << "[dmca] warning: " << message << '\n';
  }
}

void log_info(std::string_view message) {
  if (g_log_level >= static_cast<int>(LogLevel::kInfo)) {
    std::clog << "[dmca] " << message << '\n';
  }
}

}  // namespace dmca
