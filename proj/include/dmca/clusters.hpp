#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dmca/core.hpp"

namespace dmca {

// Integer-weighted undirected graph over point indices; accumulates how often
// two points were marked as neighbors of the same outlier representative.
class NeighborGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // first < second

  explicit NeighborGraph(std::size_t n = 0) : n_(n) {}

  std::size_t node_count() const { return n_; }
  std::size_t edge_count() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  std::uint64_t weight(std::size_t i, std::size_t j) const;
  void add_weight(std::size_t i, std::size_t j, std::uint64_t w);

  // Increments weight(center, y) for each y in neighbors, skipping the center.
  void bump_edges(std::size_t center, const IndexSet& neighbors);

  // Adds every weight of `other`; node counts must match.
  void merge(const NeighborGraph& other);

  // Edges in ascending (i, j) order.
  const std::map<Edge, std::uint64_t>& edges() const { return weights_; }

  friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

 private:
  std::size_t n_;
  std::map<Edge, std::uint64_t> weights_;
};

NeighborGraph merge(const NeighborGraph& g1, const NeighborGraph& g2);

// Disjoint clusters of >= 2 members, inner lists ascending, outer list sorted
// by first member.
struct MicroClusterSet {
  std::vector<IndexSet> clusters;

  std::size_t size() const { return clusters.size(); }
  bool empty() const { return clusters.empty(); }
  friend bool operator==(const MicroClusterSet&, const MicroClusterSet&) = default;
};

// Sorts members and clusters into canonical order; drops clusters of size < 2.
MicroClusterSet canonical_clusters(std::vector<std::vector<std::size_t>> groups);

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t component_size(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct FindClustersOptions {
  bool distinct_weights = true;  // build the drop sequence from distinct weights
  double sigma_mult = 3.0;
  // Search for the drop among log weights; counts are heavy-tailed and the
  // sparse top of a linear scale otherwise hides the strong/weak boundary.
  bool log_weights = true;
};

struct FindClustersResult {
  MicroClusterSet clusters;
  double edge_threshold = 0.0;  // edges with weight > threshold were kept
  bool threshold_found = false;
  std::size_t kept_edges = 0;
};

// Strong-edge connected components: weights are sorted descending, the first
// large drop gives the threshold, and components of the surviving edges are
// returned. Without a qualifying drop every edge is kept.
FindClustersResult find_clusters_detailed(const NeighborGraph& g,
                                          const FindClustersOptions& options = {});

MicroClusterSet find_clusters(const NeighborGraph& g,
                              const FindClustersOptions& options = {});

}  // namespace dmca
