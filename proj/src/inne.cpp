#include "dmca/inne.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "dmca/errors.hpp"

namespace dmca {

HypersphereModel build_hyperspheres(const Dataset& ds, const IndexSet& centers) {
  if (centers.size() < 2) {
    throw InvalidArgument("hyperspheres need at least 2 centers");
  }
  if (!centers.within(ds.size())) {
    throw InvalidArgument("hypersphere center index out of range");
  }
  HypersphereModel model;
  model.centers = centers;
  model.dim = ds.dim();
  const std::size_t psi = centers.size();
  model.coords.reserve(psi * ds.dim());
  for (std::size_t c : centers) {
    auto r = ds.row(c);
    model.coords.insert(model.coords.end(), r.begin(), r.end());
  }

  model.radius.assign(psi, std::numeric_limits<double>::infinity());
  model.nearest.assign(psi, 0);
  for (std::size_t c = 0; c < psi; ++c) {
    for (std::size_t y = 0; y < psi; ++y) {
      if (y == c) continue;
      const double dist = euclidean(model.center(c), model.center(y));
      if (dist < model.radius[c]) {
        model.radius[c] = dist;
        model.nearest[c] = y;
      }
    }
  }

  model.by_radius.resize(psi);
  std::iota(model.by_radius.begin(), model.by_radius.end(), std::size_t{0});
  std::stable_sort(model.by_radius.begin(), model.by_radius.end(),
                   [&](std::size_t a, std::size_t b) {
                     return model.radius[a] < model.radius[b];
                   });
  return model;
}

HypersphereModel fit_hyperspheres(const Dataset& ds, const IndexSet& train,
                                  std::size_t psi, Rng& rng) {
  if (psi < 2 || psi > train.size()) {
    throw InvalidArgument("iNNE fit: need 2 <= psi <= training size (psi=" +
                          std::to_string(psi) +
                          ", training size=" + std::to_string(train.size()) + ")");
  }
  const IndexSet picks = subsample_without_replacement(rng, train.size(), psi);
  std::vector<std::size_t> centers;
  centers.reserve(psi);
  for (std::size_t pos : picks) centers.push_back(train[pos]);
  return build_hyperspheres(ds, IndexSet(std::move(centers)));
}

double score_point(const HypersphereModel& model, std::span<const double> x) {
  for (std::size_t b : model.by_radius) {
    if (euclidean(x, model.center(b)) <= model.radius[b]) {
      const double rad_b = model.radius[b];
      if (rad_b == 0.0) return 0.0;
      return 1.0 - model.radius[model.nearest[b]] / rad_b;
    }
  }
  return 1.0;
}

ScoreVector score_hyperspheres(const HypersphereModel& model, const Dataset& test) {
  if (test.dim() != model.dim) {
    throw ContractViolation("iNNE score: test dimension " + std::to_string(test.dim()) +
                            " does not match model dimension " +
                            std::to_string(model.dim));
  }
  ScoreVector out(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) out[i] = score_point(model, test.row(i));
  return out;
}

InneEnsembleResult inne_ensemble_traced(const Dataset& train, const Dataset& test,
                                        std::size_t psi, std::size_t t, Rng& rng) {
  if (t == 0) throw InvalidArgument("iNNE ensemble: t must be >= 1");
  const IndexSet all = IndexSet::range(train.size());
  InneEnsembleResult result;
  result.scores.assign(test.size(), 0.0);
  for (std::size_t round = 0; round < t; ++round) {
    const HypersphereModel model = fit_hyperspheres(train, all, psi, rng);
    const ScoreVector s = score_hyperspheres(model, test);
    for (std::size_t i = 0; i < s.size(); ++i) result.scores[i] += s[i];
    result.subsamples.push_back(model.centers);
  }
  for (double& v : result.scores) v /= static_cast<double>(t);
  return result;
}

ScoreVector inne_ensemble(const Dataset& train, const Dataset& test, std::size_t psi,
                          std::size_t t, Rng& rng) {
  return inne_ensemble_traced(train, test, psi, t, rng).scores;
}

}  // namespace dmca
