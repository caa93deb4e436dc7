#pragma once

#include "forge3d/imaging/image.hpp"

namespace forge3d::imaging {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct MaskMetrics {
  double iou = 0.0;
  double bbox_iou = 0.0;
  double centroid_offset = 0.0;  // distance from a's centroid to the image center
  double max_offset = 0.0;       // half the image diagonal
};

/// Centroid of the foreground in pixel-center coordinates (pixel (x, y)
/// covers [x, x+1) x [y, y+1), its center is (x + 0.5, y + 0.5)).
Point2 centroid(const BinaryMask& mask);

double mask_iou(const BinaryMask& a, const BinaryMask& b);
double box_iou(const Box& a, const Box& b) noexcept;

/// Agreement and placement metrics for foreground estimate `a` against `b`.
/// Throws empty_mask when `a` is empty; an empty `b` yields zero overlaps.
MaskMetrics mask_metrics(const BinaryMask& a, const BinaryMask& b);

} // namespace forge3d::imaging
