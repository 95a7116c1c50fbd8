#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dmca/core.hpp"
#include "dmca/rng.hpp"

namespace dmca {

// Hyperspheres around a subsample of training points. Center positions
// (0..size()-1) follow the ascending dataset index order of `centers`.
struct HypersphereModel {
  IndexSet centers;
  std::size_t dim = 0;
  std::vector<double> coords;        // size() x dim, row-major
  std::vector<double> radius;        // distance to the nearest other center
  std::vector<std::size_t> nearest;  // position of that nearest other center
  std::vector<std::size_t> by_radius;  // positions ordered by (radius, position)

  std::size_t size() const { return radius.size(); }
  std::span<const double> center(std::size_t pos) const {
    return {coords.data() + pos * dim, dim};
  }
};

// Builds the model on an explicit center set (>= 2 centers).
HypersphereModel build_hyperspheres(const Dataset& ds, const IndexSet& centers);

// Draws psi centers uniformly without replacement from `train` (indices into
// ds) and builds the model. Throws InvalidArgument when psi < 2 or
// psi > train.size().
HypersphereModel fit_hyperspheres(const Dataset& ds, const IndexSet& train,
                                  std::size_t psi, Rng& rng);

// Isolation score of one point: 1 when no closed ball contains x; otherwise,
// with b the smallest containing ball (ties -> lowest position) and a the
// center nearest to b, 1 - rad(a) / rad(b). A zero-radius b scores 0.
double score_point(const HypersphereModel& model, std::span<const double> x);

ScoreVector score_hyperspheres(const HypersphereModel& model, const Dataset& test);

struct InneEnsembleResult {
  ScoreVector scores;
  std::vector<IndexSet> subsamples;  // centers of each round, indices into train
};

// Mean of t independent fit + score rounds. Training uses every row of
// `train`; every row of `test` is scored.
InneEnsembleResult inne_ensemble_traced(const Dataset& train, const Dataset& test,
                                        std::size_t psi, std::size_t t, Rng& rng);

ScoreVector inne_ensemble(const Dataset& train, const Dataset& test, std::size_t psi,
                          std::size_t t, Rng& rng);

}  // namespace dmca
