#pragma once

#include <string>
#include <vector>

#include "forge3d/imaging/image.hpp"

namespace forge3d::scoring {

inline constexpr int kViewCount = 9;
inline constexpr double kYawStepDegrees = 45.0;

/// Renders of one candidate; view i is taken at yaw i * 45 degrees and view 0
/// is the front reference.
struct MultiViewSet {
  std::string candidate_id;
  std::vector<imaging::RasterImage> views;

  /// Throws invalid_argument unless there are exactly 9 equally sized views.
  void validate() const;
};

} // namespace forge3d::scoring
