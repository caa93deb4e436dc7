#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "forge3d/scoring/dimensions.hpp"

namespace forge3d::scoring {

enum class Provenance { computed, judge, missing };
std::string_view provenance_name(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view name) noexcept;

struct DimensionValue {
  std::optional<double> value;  // in [0, 1]; nullopt means missing, never zero
  std::optional<double> raw;    // un-normalized source value when it differs
  Provenance provenance = Provenance::missing;

  bool present() const noexcept { return value.has_value(); }
  static DimensionValue missing() noexcept { return {}; }
  friend bool operator==(const DimensionValue&, const DimensionValue&) = default;
};

class ScoreVector {
public:
  const DimensionValue& operator[](Dimension d) const noexcept {
    return values_[static_cast<std::size_t>(index_of(d))];
  }
  std::optional<double> value(Dimension d) const noexcept { return (*this)[d].value; }

  /// Throws range_violation if a present value lies outside [0, 1].
  void set(Dimension d, DimensionValue v);

  std::size_t present_count() const noexcept;
  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

private:
  std::array<DimensionValue, kDimensionCount> values_{};
};

struct LowLevelScores {
  double color_consistency = 0.0;
  double light_consistency = 0.0;
  double clip_score = 0.0;
  double clip_score_raw = 0.0;
  double clip_i = 0.0;
  double clip_i_raw = 0.0;  // mean raw cosine
};

/// Judge-derived values for the four high-level dimensions, each normalized
/// to [0.1, 1] or absent.
struct HighLevelScores {
  std::optional<double> text_image_alignment;
  std::optional<double> plausibility_3d;
  std::optional<double> texture_geometry;
  std::optional<double> low_level_texture;
};

/// Absent judge values become `missing`; out-of-range values throw
/// range_violation.
ScoreVector assemble_score_vector(const LowLevelScores& low,
                                  const std::optional<HighLevelScores>& high);

} // namespace forge3d::scoring
