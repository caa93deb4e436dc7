#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "forge3d/imaging/image.hpp"
#include "forge3d/scoring/multiview.hpp"

namespace forge3d::providers {

enum class Shape { sphere, cube, torus };

/// Procedural stand-in for a generated 3D model.
struct ObjectSpec {
  Shape shape = Shape::sphere;
  imaging::Rgb color{200, 80, 80};
  imaging::Rgb accent{40, 40, 160};
  double scale = 0.32;     // half extent relative to image size
  double offset_x = 0.0;   // relative to image size
  double offset_y = 0.0;
  double light_phase = 0.0;
  double marker_phase = 0.0;
  bool clutter = false;
  std::optional<int> defect_view;  // view whose foreground hue is inverted
};

inline constexpr imaging::Rgb kBackground{238, 238, 238};

/// Derives an object from (seed, prompt). Color words in the prompt pick the
/// base color; everything else comes from the hash.
ObjectSpec spec_for_prompt(std::string_view prompt, std::uint64_t seed);

imaging::RasterImage render_view(const ObjectSpec& spec, int view_index, int size);
scoring::MultiViewSet render_views(const ObjectSpec& spec, int size, std::string candidate_id);

} // namespace forge3d::providers
