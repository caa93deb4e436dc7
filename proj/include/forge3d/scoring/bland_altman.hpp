#pragma once

#include <span>
#include <utility>

namespace forge3d::scoring {

struct BlandAltman {
  double mean_diff = 0.0;
  double sd = 0.0;  // sample standard deviation of the differences
  double lower = 0.0;
  double upper = 0.0;
  double fraction_inside = 0.0;
  std::size_t n = 0;
};

/// Differences are engine minus reference. Throws insufficient_data for
/// fewer than two pairs.
BlandAltman bland_altman(std::span<const std::pair<double, double>> pairs);

} // namespace forge3d::scoring
