#include "dmca/sampling.hpp"

#include <algorithm>
#include <limits>

#include "dmca/errors.hpp"

namespace dmca {

MaximinTrace maximin_sample(const Dataset& ds, const IndexSet& candidates,
                            const ScoreVector& scores, double stop_ratio) {
  if (candidates.empty()) throw InvalidArgument("maximin_sample: empty candidate set");
  if (!(stop_ratio > 0.0 && stop_ratio < 1.0)) {
    throw InvalidArgument("maximin_sample: stop_ratio must lie in (0, 1)");
  }
  if (!candidates.within(ds.size()) || scores.size() != ds.size()) {
    throw InvalidArgument("maximin_sample: candidates or scores do not match dataset");
  }

  const std::size_t k = candidates.size();
  std::size_t seed = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (scores[candidates[c]] > scores[candidates[seed]]) seed = c;
  }

  double diameter = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      diameter = std::max(diameter, euclidean(ds.row(candidates[a]), ds.row(candidates[b])));
    }
  }

  MaximinTrace trace;
  std::vector<bool> taken(k, false);
  std::vector<double> projection(k, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t c, double proj) {
    taken[c] = true;
    trace.selected.push_back(candidates[c]);
    trace.projections.push_back(proj);
    for (std::size_t o = 0; o < k; ++o) {
      if (!taken[o]) {
        projection[o] = std::min(projection[o],
                                 euclidean(ds.row(candidates[o]), ds.row(candidates[c])));
      }
    }
  };

  take(seed, diameter);
  while (trace.selected.size() < k) {
    std::size_t best = k;
    for (std::size_t o = 0; o < k; ++o) {
      if (taken[o]) continue;
      if (best == k || projection[o] > projection[best]) best = o;
    }
    const double proj = projection[best];
    if (proj < stop_ratio * trace.projections.back()) break;
    take(best, proj);
  }
  return trace;
}

}  // namespace dmca
