#pragma once

#include <span>
#include <vector>

#include "forge3d/imaging/image.hpp"

namespace forge3d::imaging {

/// sRGB (D65) to CIELAB. a and b are clamped to [-128, 127].
LabImage rgb_to_lab(const RasterImage& img);
LabPixel rgb_to_lab(Rgb c) noexcept;

enum class HistogramMode { lab3d, l_channel };

inline constexpr int kLabBinsPerAxis = 8;
inline constexpr int kLabBins = kLabBinsPerAxis * kLabBinsPerAxis * kLabBinsPerAxis;
inline constexpr int kLightBins = 32;

constexpr int bin_count(HistogramMode mode) noexcept {
  return mode == HistogramMode::lab3d ? kLabBins : kLightBins;
}

struct Histogram {
  HistogramMode mode = HistogramMode::lab3d;
  std::vector<double> bins;

  int bin_count() const noexcept { return static_cast<int>(bins.size()); }
};

int bin_index(const LabPixel& p, HistogramMode mode) noexcept;

/// Normalized histogram over all pixels, or over mask foreground when a mask is
/// given. Throws empty_mask if the mask has no foreground.
Histogram histogram(const LabImage& img, HistogramMode mode, const BinaryMask* mask = nullptr);

/// Normalized histogram over the masked pixels inside `region`. Returns an
/// empty bins vector when no foreground falls inside the region.
Histogram histogram_in_region(const LabImage& img, HistogramMode mode, const BinaryMask& mask,
                              const Box& region);

/// Arithmetic mean of normalized histograms, renormalized.
Histogram mean_histogram(std::span<const Histogram> hists);

/// Bhattacharyya coefficient: sum_i sqrt(p_i * q_i). Throws mode_mismatch on
/// differing layouts.
double bhattacharyya(const Histogram& p, const Histogram& q);

} // namespace forge3d::imaging
