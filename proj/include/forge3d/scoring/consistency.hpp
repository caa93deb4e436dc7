#pragma once

#include <span>
#include <vector>

#include "forge3d/imaging/color.hpp"
#include "forge3d/providers/interfaces.hpp"
#include "forge3d/scoring/multiview.hpp"

namespace forge3d::scoring {

enum class Channel { color, light };

/// Per-view data shared by the consistency and defect computations.
struct ViewAnalysis {
  imaging::LabImage lab;
  imaging::BinaryMask mask;
  imaging::Histogram lab_hist;
  imaging::Histogram light_hist;
};

/// Converts every view and computes its foreground mask (segmentation
/// provider first, saliency as fallback). Throws unscorable if a view has no
/// foreground from either source.
std::vector<ViewAnalysis> analyze_views(const MultiViewSet& set,
                                        providers::SegmentationProvider& seg);

/// Mean Bhattacharyya coefficient of each histogram against their mean.
/// Accepts any N >= 1; the engine only calls it with nine views.
double consistency_from_histograms(std::span<const imaging::Histogram> hists);

/// Per-view BC(H_i, mean). Same order as the input.
std::vector<double> per_view_consistency(std::span<const imaging::Histogram> hists);

/// Color (joint Lab) or light (L channel) consistency of a nine-view set.
double view_consistency(std::span<const ViewAnalysis> views, Channel channel);

} // namespace forge3d::scoring
