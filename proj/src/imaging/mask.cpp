#include "forge3d/imaging/mask.hpp"

#include <algorithm>
#include <cmath>

#include "forge3d/common/error.hpp"

namespace forge3d::imaging {

namespace {

void check_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::invalid_argument, "mask dimensions differ", "imaging");
  }
}

} // namespace

Point2 centroid(const BinaryMask& mask) {
  if (mask.empty()) throw Error(ErrorCode::empty_mask, "centroid of empty mask", "imaging");
  double sx = 0.0;
  double sy = 0.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x + 0.5;
      sy += y + 0.5;
    }
  }
  const auto n = static_cast<double>(mask.count());
  return {sx / n, sy / n};
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  check_same_dims(a, b);
  const auto abits = a.bits();
  const auto bbits = b.bits();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < abits.size(); ++i) {
    inter += (abits[i] & bbits[i]) ? 1U : 0U;
    uni += (abits[i] | bbits[i]) ? 1U : 0U;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const Box& a, const Box& b) noexcept {
  if (a.empty() || b.empty()) return 0.0;
  const Box inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                  std::min(a.y1, b.y1)};
  const long long i = inter.area();
  const long long u = a.area() + b.area() - i;
  return u == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(u);
}

MaskMetrics mask_metrics(const BinaryMask& a, const BinaryMask& b) {
  check_same_dims(a, b);
  if (a.empty()) throw Error(ErrorCode::empty_mask, "reference mask is empty", "imaging");
  MaskMetrics m;
  if (!b.empty()) {
    m.iou = mask_iou(a, b);
    m.bbox_iou = box_iou(a.bbox(), b.bbox());
  }
  const Point2 c = centroid(a);
  const double cx = a.width() / 2.0;
  const double cy = a.height() / 2.0;
  m.max_offset = std::hypot(static_cast<double>(a.width()), static_cast<double>(a.height())) / 2.0;
  m.centroid_offset = std::min(std::hypot(c.x - cx, c.y - cy), m.max_offset);
  return m;
}

} // namespace forge3d::imaging
