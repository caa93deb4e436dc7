#include "forge3d/scoring/dimensions.hpp"
#include "forge3d/scoring/multiview.hpp"
#include "forge3d/scoring/score_vector.hpp"

#include <cmath>

#include "forge3d/common/error.hpp"

namespace forge3d::scoring {

namespace {
constexpr std::array<std::string_view, kDimensionCount> kNames = {
    "color_consistency",    "light_consistency", "clip_score",       "clip_i",
    "text_image_alignment", "plausibility_3d",   "texture_geometry", "low_level_texture",
};
} // namespace

std::string_view dimension_name(Dimension d) noexcept {
  return kNames[static_cast<std::size_t>(index_of(d))];
}

std::optional<Dimension> parse_dimension(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Dimension>(i);
  }
  return std::nullopt;
}

void MultiViewSet::validate() const {
  if (views.size() != static_cast<std::size_t>(kViewCount)) {
    throw Error(ErrorCode::invalid_argument,
                "multi-view set needs 9 views, got " + std::to_string(views.size()), "scoring");
  }
  for (const auto& v : views) {
    if (v.width() != views.front().width() || v.height() != views.front().height()) {
      throw Error(ErrorCode::invalid_argument, "views differ in size", "scoring");
    }
  }
}

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
  case Provenance::computed: return "computed";
  case Provenance::judge: return "judge";
  case Provenance::missing: return "missing";
  }
  return "missing";
}

std::optional<Provenance> parse_provenance(std::string_view name) noexcept {
  if (name == "computed") return Provenance::computed;
  if (name == "judge") return Provenance::judge;
  if (name == "missing") return Provenance::missing;
  return std::nullopt;
}

void ScoreVector::set(Dimension d, DimensionValue v) {
  if (v.value && !(*v.value >= 0.0 && *v.value <= 1.0)) {
    throw Error(ErrorCode::range_violation,
                std::string(dimension_name(d)) + " value " + std::to_string(*v.value) +
                    " outside [0, 1]",
                "scoring");
  }
  if (!v.value) v.provenance = Provenance::missing;
  values_[static_cast<std::size_t>(index_of(d))] = v;
}

std::size_t ScoreVector::present_count() const noexcept {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.present() ? 1U : 0U;
  return n;
}

ScoreVector assemble_score_vector(const LowLevelScores& low,
                                  const std::optional<HighLevelScores>& high) {
  ScoreVector sv;
  sv.set(Dimension::color_consistency, {low.color_consistency, std::nullopt, Provenance::computed});
  sv.set(Dimension::light_consistency, {low.light_consistency, std::nullopt, Provenance::computed});
  sv.set(Dimension::clip_score, {low.clip_score, low.clip_score_raw, Provenance::computed});
  sv.set(Dimension::clip_i, {low.clip_i, low.clip_i_raw, Provenance::computed});
  const auto judged = [](const std::optional<double>& v) {
    return v ? DimensionValue{*v, *v * 10.0, Provenance::judge} : DimensionValue::missing();
  };
  if (high) {
    sv.set(Dimension::text_image_alignment, judged(high->text_image_alignment));
    sv.set(Dimension::plausibility_3d, judged(high->plausibility_3d));
    sv.set(Dimension::texture_geometry, judged(high->texture_geometry));
    sv.set(Dimension::low_level_texture, judged(high->low_level_texture));
  }
  return sv;
}

} // namespace forge3d::scoring
