#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace forge3d::scoring {

// Fixed order: four low-level metrics, then the four judge metrics.
enum class Dimension {
  color_consistency,
  light_consistency,
  clip_score,
  clip_i,
  text_image_alignment,
  plausibility_3d,
  texture_geometry,
  low_level_texture,
};

inline constexpr int kDimensionCount = 8;

inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::color_consistency, Dimension::light_consistency, Dimension::clip_score,
    Dimension::clip_i,            Dimension::text_image_alignment, Dimension::plausibility_3d,
    Dimension::texture_geometry,  Dimension::low_level_texture,
};

constexpr int index_of(Dimension d) noexcept { return static_cast<int>(d); }
constexpr bool is_high_level(Dimension d) noexcept { return index_of(d) >= 4; }

std::string_view dimension_name(Dimension d) noexcept;
std::optional<Dimension> parse_dimension(std::string_view name) noexcept;

} // namespace forge3d::scoring
