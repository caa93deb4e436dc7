#include "forge3d/scoring/defect.hpp"

#include <algorithm>

namespace forge3d::scoring {

bool flag_rule(std::span<const double> deviation, const std::vector<bool>& covered,
               const DefectOptions& options) {
  std::size_t covered_count = 0;
  std::size_t defective = 0;
  for (std::size_t i = 0; i < deviation.size(); ++i) {
    if (!covered[i]) continue;
    ++covered_count;
    if (deviation[i] > options.patch_threshold) ++defective;
  }
  if (covered_count == 0) return false;
  return static_cast<double>(defective) / static_cast<double>(covered_count) >
         options.flag_fraction;
}

namespace {

imaging::Box patch_box(int col, int row, int grid, int width, int height) {
  return {col * width / grid, row * height / grid, (col + 1) * width / grid - 1,
          (row + 1) * height / grid - 1};
}

bool overlaps(const RegionRect& r, int col, int row, int grid) {
  const double px0 = static_cast<double>(col) / grid;
  const double py0 = static_cast<double>(row) / grid;
  const double px1 = static_cast<double>(col + 1) / grid;
  const double py1 = static_cast<double>(row + 1) / grid;
  return r.x < px1 && r.x + r.w > px0 && r.y < py1 && r.y + r.h > py0;
}

} // namespace

DefectMap defect_heatmap(std::span<const ViewAnalysis> views, const DefectOptions& options,
                         std::span<const std::vector<RegionRect>> judge_regions) {
  if (options.grid < 1) throw Error(ErrorCode::config_error, "defect grid must be >= 1", "scoring");
  const int g = options.grid;
  const std::size_t cells = static_cast<std::size_t>(g * g);
  DefectMap map;
  map.grid = g;
  map.views.resize(views.size());

  // Patch histograms per view; empty bins mean "no foreground in this patch".
  std::vector<std::vector<imaging::Histogram>> patches(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& va = views[v];
    patches[v].reserve(cells);
    for (int row = 0; row < g; ++row) {
      for (int col = 0; col < g; ++col) {
        patches[v].push_back(imaging::histogram_in_region(
            va.lab, imaging::HistogramMode::lab3d, va.mask,
            patch_box(col, row, g, va.lab.width, va.lab.height)));
      }
    }
  }

  for (std::size_t v = 0; v < views.size(); ++v) {
    map.views[v].deviation.assign(cells, 0.0);
    map.views[v].covered.assign(cells, false);
  }
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<imaging::Histogram> present;
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (!patches[v][c].bins.empty()) present.push_back(patches[v][c]);
    }
    if (present.empty()) continue;
    const auto mean = imaging::mean_histogram(present);
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (patches[v][c].bins.empty()) continue;
      map.views[v].covered[c] = true;
      map.views[v].deviation[c] =
          std::clamp(1.0 - imaging::bhattacharyya(patches[v][c], mean), 0.0, 1.0);
    }
  }

  for (std::size_t v = 0; v < views.size(); ++v) {
    auto& vd = map.views[v];
    if (v < judge_regions.size() && !judge_regions[v].empty()) {
      vd.judge_override = true;
      for (int row = 0; row < g; ++row) {
        for (int col = 0; col < g; ++col) {
          const bool hit = std::any_of(judge_regions[v].begin(), judge_regions[v].end(),
                                       [&](const RegionRect& r) { return overlaps(r, col, row, g); });
          const auto c = static_cast<std::size_t>(row * g + col);
          vd.deviation[c] = hit ? 1.0 : 0.0;
          if (hit) vd.covered[c] = true;
        }
      }
    }
    vd.flagged = flag_rule(vd.deviation, vd.covered, options);
  }
  return map;
}

} // namespace forge3d::scoring
