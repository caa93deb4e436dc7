#pragma once

#include "forge3d/imaging/image.hpp"
#include "forge3d/imaging/mask.hpp"
#include "forge3d/providers/interfaces.hpp"

namespace forge3d::scoring {

struct FriendlyWeights {
  double offset = 0.3;
  double iou = 0.4;
  double bbox = 0.3;

  /// Throws config_error unless all weights are non-negative and sum to 1.
  void validate() const;
  friend bool operator==(const FriendlyWeights&, const FriendlyWeights&) = default;
};

/// Which foreground estimate supplies the centroid offset. The other one is
/// only used for the agreement (IoU) terms.
enum class OffsetSource { segmentation, saliency };

struct FriendlyOptions {
  FriendlyWeights weights;
  OffsetSource offset_source = OffsetSource::segmentation;
  friend bool operator==(const FriendlyOptions&, const FriendlyOptions&) = default;
};

struct ThreeDFriendlyScore {
  double co_term = 0.0;  // 1 - O / O_max
  double iou = 0.0;
  double bbox_iou = 0.0;
  double total = 0.0;
  double centroid_offset = 0.0;
  double max_offset = 0.0;
  FriendlyWeights weights;
  friend bool operator==(const ThreeDFriendlyScore&, const ThreeDFriendlyScore&) = default;
};

/// Weighted sum of the three gate terms; each term must be in [0, 1].
ThreeDFriendlyScore compose_three_d_friendly(double co_term, double iou, double bbox_iou,
                                             const FriendlyWeights& weights = {});

/// Gate score of a single image. The saliency mask and the segmentation mask
/// are compared with each other; throws unscorable when neither finds a
/// foreground.
ThreeDFriendlyScore three_d_friendly(const imaging::RasterImage& img,
                                     providers::SegmentationProvider& seg,
                                     const FriendlyOptions& options = {});

} // namespace forge3d::scoring
