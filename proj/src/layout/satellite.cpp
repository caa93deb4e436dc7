#include <cmath>
#include <numbers>

#include "forge3d/common/error.hpp"
#include "forge3d/layout/layout.hpp"

namespace forge3d::layout {

SatelliteLayout satellite(std::span<const std::optional<double>> scores, double r_min, double r_max,
                          Vec2 center) {
  if (!(r_min >= 0.0 && r_min < r_max)) {
    throw Error(ErrorCode::bad_radii, "satellite radii need 0 <= r_min < r_max", "layout");
  }
  if (scores.size() != static_cast<std::size_t>(scoring::kViewCount)) {
    throw Error(ErrorCode::invalid_argument, "satellite needs one score per view", "layout");
  }
  for (const auto& s : scores) {
    if (s && !(*s >= 0.0 && *s <= 1.0)) {
      throw Error(ErrorCode::range_violation, "satellite score outside [0, 1]", "layout");
    }
  }
  SatelliteLayout out;
  out.center = center;
  out.center_score = scores[0];
  out.r_min = r_min;
  out.r_max = r_max;
  for (int v = 1; v < scoring::kViewCount; ++v) {
    Satellite sat;
    sat.view = v;
    sat.angle_deg = v * static_cast<double>(scoring::kYawStepDegrees);
    sat.score = scores[static_cast<std::size_t>(v)];
    sat.hollow = !sat.score.has_value();
    const double s = sat.score.value_or(0.0);
    sat.radius = r_min + (1.0 - s) * (r_max - r_min);
    const double theta = sat.angle_deg * std::numbers::pi / 180.0;
    sat.position = {center.x + sat.radius * std::cos(theta), center.y + sat.radius * std::sin(theta)};
    sat.color_index = 1.0 - s;
    out.satellites.push_back(sat);
  }
  return out;
}

} // namespace forge3d::layout
