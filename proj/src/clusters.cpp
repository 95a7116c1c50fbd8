#include "dmca/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "dmca/errors.hpp"
#include "dmca/peaks.hpp"

namespace dmca {

std::uint64_t NeighborGraph::weight(std::size_t i, std::size_t j) const {
  if (i == j) return 0;
  auto it = weights_.find({std::min(i, j), std::max(i, j)});
  return it == weights_.end() ? 0 : it->second;
}

void NeighborGraph::add_weight(std::size_t i, std::size_t j, std::uint64_t w) {
  if (i >= n_ || j >= n_) throw InvalidArgument("NeighborGraph: node index out of range");
  if (i == j || w == 0) return;
  weights_[{std::min(i, j), std::max(i, j)}] += w;
}

void NeighborGraph::bump_edges(std::size_t center, const IndexSet& neighbors) {
  if (center >= n_ || !neighbors.within(n_)) {
    throw InvalidArgument("bump_edges: index out of range");
  }
  for (std::size_t y : neighbors) {
    if (y != center) weights_[{std::min(center, y), std::max(center, y)}] += 1;
  }
}

void NeighborGraph::merge(const NeighborGraph& other) {
  if (other.n_ != n_) {
    throw InvalidArgument("merge: node counts differ (" + std::to_string(n_) + " vs " +
                          std::to_string(other.n_) + ")");
  }
  for (const auto& [edge, w] : other.weights_) weights_[edge] += w;
}

NeighborGraph merge(const NeighborGraph& g1, const NeighborGraph& g2) {
  NeighborGraph out = g1;
  out.merge(g2);
  return out;
}

MicroClusterSet canonical_clusters(std::vector<std::vector<std::size_t>> groups) {
  MicroClusterSet out;
  for (auto& g : groups) {
    IndexSet members = IndexSet::from_unsorted(std::move(g));
    if (members.size() >= 2) out.clusters.push_back(std::move(members));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const IndexSet& a, const IndexSet& b) { return a[0] < b[0]; });
  return out;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

FindClustersResult find_clusters_detailed(const NeighborGraph& g,
                                          const FindClustersOptions& options) {
  FindClustersResult result;
  if (g.empty()) return result;

  std::vector<double> w;
  w.reserve(g.edge_count());
  for (const auto& [edge, weight] : g.edges()) w.push_back(static_cast<double>(weight));
  std::sort(w.begin(), w.end(), std::greater<>());
  if (options.distinct_weights) w.erase(std::unique(w.begin(), w.end()), w.end());

  if (w.size() >= 2) {
    if (options.log_weights) {
      for (double& x : w) x = std::log(x);
    }
    const PeakResult drop = find_first_drop(w, options.sigma_mult);
    result.threshold_found = drop.found;
    result.edge_threshold = options.log_weights ? std::exp(drop.threshold) : drop.threshold;
  }

  UnionFind uf(g.node_count());
  std::vector<bool> touched(g.node_count(), false);
  for (const auto& [edge, weight] : g.edges()) {
    if (result.threshold_found && !(static_cast<double>(weight) > result.edge_threshold)) {
      continue;
    }
    uf.unite(edge.first, edge.second);
    touched[edge.first] = touched[edge.second] = true;
    ++result.kept_edges;
  }
  if (!result.threshold_found) result.edge_threshold = 0.0;

  std::vector<std::vector<std::size_t>> groups(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (touched[v]) groups[uf.find(v)].push_back(v);
  }
  std::erase_if(groups, [](const auto& grp) { return grp.empty(); });
  result.clusters = canonical_clusters(std::move(groups));
  return result;
}

MicroClusterSet find_clusters(const NeighborGraph& g, const FindClustersOptions& options) {
  return find_clusters_detailed(g, options).clusters;
}

}  // namespace dmca
