#pragma once

#include <cstddef>
#include <vector>

#include "dmca/core.hpp"

namespace dmca {

struct MaximinTrace {
  std::vector<std::size_t> selected;  // dataset indices, in selection order
  // projections[k]: distance from selected[k] to selected[0..k-1]. The first
  // entry has no predecessor and records the candidate-set diameter instead.
  std::vector<double> projections;
};

// Farthest-first traversal over `candidates` seeded by the highest-scoring
// candidate. Stops at the first selection whose projection falls below
// stop_ratio times the previous projection; that selection is dropped.
MaximinTrace maximin_sample(const Dataset& ds, const IndexSet& candidates,
                            const ScoreVector& scores, double stop_ratio = 0.5);

}  // namespace dmca
