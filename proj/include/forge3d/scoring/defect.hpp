#pragma once

#include <span>
#include <vector>

#include "forge3d/scoring/consistency.hpp"

namespace forge3d::scoring {

struct DefectOptions {
  int grid = 8;                     // G x G patches per view
  double patch_threshold = 0.5;     // a patch is defective above this deviation
  double flag_fraction = 0.25;      // view flagged when defective share exceeds this
  friend bool operator==(const DefectOptions&, const DefectOptions&) = default;
};

/// Normalized rectangle in [0, 1] view coordinates.
struct RegionRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  friend bool operator==(const RegionRect&, const RegionRect&) = default;
};

struct ViewDefects {
  std::vector<double> deviation;  // G*G, row-major, in [0, 1]
  std::vector<bool> covered;      // patch contains foreground
  bool flagged = false;
  bool judge_override = false;
  friend bool operator==(const ViewDefects&, const ViewDefects&) = default;
};

struct DefectMap {
  int grid = 8;
  std::vector<ViewDefects> views;
  friend bool operator==(const DefectMap&, const DefectMap&) = default;
};

/// True when the share of covered patches with deviation above the patch
/// threshold exceeds the flag fraction.
bool flag_rule(std::span<const double> deviation, const std::vector<bool>& covered,
               const DefectOptions& options);

/// Patch deviation = 1 - BC(patch Lab histogram in this view, mean of the same
/// patch's histograms over all views that cover it). Views with judge regions
/// replace their grid: a patch is 1 when it overlaps a region, otherwise 0.
DefectMap defect_heatmap(std::span<const ViewAnalysis> views, const DefectOptions& options = {},
                         std::span<const std::vector<RegionRect>> judge_regions = {});

} // namespace forge3d::scoring
