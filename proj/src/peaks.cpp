#include "dmca/peaks.hpp"

#include <cmath>
#include <vector>

#include "dmca/errors.hpp"

namespace dmca {

PeakResult find_first_gap(std::span<const double> v, double sigma_mult) {
  if (v.size() < 2) throw InvalidArgument("find_first_gap: need at least 2 values");
  const std::size_t m = v.size() - 1;
  std::vector<double> diff(m);
  for (std::size_t i = 0; i < m; ++i) {
    diff[i] = v[i + 1] - v[i];
    if (diff[i] < 0.0) throw InvalidArgument("find_first_gap: values must be non-decreasing");
  }

  bool constant = true;
  for (std::size_t i = 1; i < m; ++i) {
    if (diff[i] != diff[0]) {
      constant = false;
      break;
    }
  }
  if (constant && m > 1) return {false, 0, v.back()};

  double mean = 0.0;
  for (double x : diff) mean += x;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double x : diff) var += (x - mean) * (x - mean);
  const double cutoff = mean + sigma_mult * std::sqrt(var / static_cast<double>(m));

  auto midpoint = [&](std::size_t i) { return 0.5 * (v[i] + v[i + 1]); };

  for (std::size_t i = 0; i < m; ++i) {
    const bool above_left = i == 0 || diff[i] > diff[i - 1];
    const bool above_right = i + 1 == m || diff[i] >= diff[i + 1];
    if (above_left && above_right && diff[i] > cutoff) return {true, i, midpoint(i)};
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (diff[i] > diff[best]) best = i;
  }
  if (diff[best] == 0.0) return {false, 0, v.back()};
  return {true, best, midpoint(best)};
}

PeakResult find_first_drop(std::span<const double> v, double sigma_mult) {
  if (v.size() < 2) throw InvalidArgument("find_first_drop: need at least 2 values");
  std::vector<double> negated(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) negated[i] = -v[i];
  PeakResult r = find_first_gap(negated, sigma_mult);
  r.threshold = -r.threshold;
  return r;
}

}  // namespace dmca
