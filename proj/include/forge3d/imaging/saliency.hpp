#pragma once

#include <span>

#include "forge3d/imaging/image.hpp"

namespace forge3d::imaging {

struct SaliencyResult {
  ScalarMap saliency;
  BinaryMask mask;
  Box bbox;
};

/// Spectral-residual saliency on a 64x64 grayscale thumbnail, upsampled back to
/// the image size and binarized at the Otsu level of the map. Components of
/// the binary map peaking within 10% of the maximum are kept, cut at 60% of
/// the maximum and filled to their convex hull. Throws no_foreground for uniform images.
SaliencyResult saliency_mask(const RasterImage& img);

/// Otsu threshold over values in [0, 1] using 256 levels. Returns the level t
/// such that foreground is `value > t`, or nullopt for a flat input.
std::optional<double> otsu_threshold(std::span<const float> values);

/// Foreground = values above the Otsu level. Throws no_foreground on flat maps.
BinaryMask threshold_otsu(const ScalarMap& map);

} // namespace forge3d::imaging
