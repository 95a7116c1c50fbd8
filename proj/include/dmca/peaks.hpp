#pragma once

#include <cstddef>
#include <span>

namespace dmca {

struct PeakResult {
  bool found = false;
  std::size_t peak_index = 0;  // index into the consecutive-difference sequence
  double threshold = 0.0;
};

// First large gap in a non-decreasing sequence. A gap qualifies when its
// difference is a local maximum of the difference sequence and exceeds
// mean + sigma_mult * stdev of all differences (population stdev); without a
// qualifying gap the largest difference is used. The threshold is the
// midpoint of the gap. Constant input gives found = false and the last value.
PeakResult find_first_gap(std::span<const double> sorted_values, double sigma_mult = 3.0);

// First large drop in a non-increasing sequence; the threshold separates the
// pre-drop prefix (values > threshold) from the rest.
PeakResult find_first_drop(std::span<const double> sorted_desc_values,
                           double sigma_mult = 3.0);

}  // namespace dmca
