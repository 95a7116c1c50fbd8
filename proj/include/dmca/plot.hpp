#pragma once

#include <string>

#include "dmca/clusters.hpp"
#include "dmca/core.hpp"

namespace dmca {

struct PlotInput {
  const Dataset* data = nullptr;
  const ScoreVector* scores = nullptr;       // optional
  const MicroClusterSet* clusters = nullptr;  // optional
  const GroundTruth* truth = nullptr;         // optional, used without scores
};

// SVG scatter of a 2D dataset. Inliers are gray dots; outliers are star
// glyphs sized by score and colored by predicted cluster. With scores, the
// outliers are the top ceil(0.1 n) points and cluster members; without
// scores, cluster members and points labeled as outliers in the truth.
// Throws InvalidArgument when the dataset is not 2D.
std::string render_svg(const PlotInput& input, int size = 720);

}  // namespace dmca
