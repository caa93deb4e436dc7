#include "forge3d/scoring/three_d_friendly.hpp"

#include <cmath>

#include "forge3d/imaging/saliency.hpp"

namespace forge3d::scoring {

void FriendlyWeights::validate() const {
  if (offset < 0 || iou < 0 || bbox < 0 || std::abs(offset + iou + bbox - 1.0) > 1e-9) {
    throw Error(ErrorCode::config_error, "3D-friendly weights must be non-negative and sum to 1",
                "scoring");
  }
}

ThreeDFriendlyScore compose_three_d_friendly(double co_term, double iou, double bbox_iou,
                                             const FriendlyWeights& weights) {
  weights.validate();
  for (const double term : {co_term, iou, bbox_iou}) {
    if (!(term >= 0.0 && term <= 1.0)) {
      throw Error(ErrorCode::range_violation, "gate term outside [0, 1]", "scoring");
    }
  }
  ThreeDFriendlyScore s;
  s.co_term = co_term;
  s.iou = iou;
  s.bbox_iou = bbox_iou;
  s.weights = weights;
  s.total = weights.offset * co_term + weights.iou * iou + weights.bbox * bbox_iou;
  return s;
}

ThreeDFriendlyScore three_d_friendly(const imaging::RasterImage& img,
                                     providers::SegmentationProvider& seg,
                                     const FriendlyOptions& options) {
  std::optional<imaging::BinaryMask> salient;
  try {
    salient = imaging::saliency_mask(img).mask;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_foreground) throw;
  }
  std::optional<imaging::BinaryMask> segmented;
  try {
    auto m = seg.segment(img);
    if (!m.empty()) segmented = std::move(m);
  } catch (const providers::ProviderError&) {
    // Treated as "no foreground from this source".
  }
  if (!salient && !segmented) {
    throw Error(ErrorCode::unscorable, "no foreground from saliency or segmentation", "gate");
  }

  const bool use_seg = options.offset_source == OffsetSource::segmentation ? segmented.has_value()
                                                                           : !salient.has_value();
  const imaging::BinaryMask& primary = use_seg ? *segmented : *salient;
  const std::optional<imaging::BinaryMask>& other = use_seg ? salient : segmented;
  const imaging::MaskMetrics m =
      imaging::mask_metrics(primary, other ? *other : imaging::BinaryMask(img.width(), img.height()));

  const double co_term = std::clamp(1.0 - m.centroid_offset / m.max_offset, 0.0, 1.0);
  auto score = compose_three_d_friendly(co_term, m.iou, m.bbox_iou, options.weights);
  score.centroid_offset = m.centroid_offset;
  score.max_offset = m.max_offset;
  return score;
}

} // namespace forge3d::scoring
