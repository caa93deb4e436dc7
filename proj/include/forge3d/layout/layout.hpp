#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge3d/promptlab/promptlab.hpp"
#include "forge3d/scoring/multiview.hpp"
#include "forge3d/scoring/score_vector.hpp"

// Geometry in abstract canvas units. y grows downward.
namespace forge3d::layout {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double area() const noexcept { return w * h; }
  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// ------------------------------------------------------------ satellite

struct Satellite {
  int view = 1;
  double angle_deg = 0.0;  // view * 45
  double radius = 0.0;
  Vec2 position;
  double color_index = 0.0;  // 0 deep blue .. 1 light blue
  std::optional<double> score;
  bool hollow = false;       // score missing, drawn as if 0
};

struct SatelliteLayout {
  Vec2 center;
  std::optional<double> center_score;
  double r_min = 0.0;
  double r_max = 0.0;
  std::vector<Satellite> satellites;  // views 1..8
};

/// radius = r_min + (1 - s) (r_max - r_min). `scores` holds one entry per
/// view (9); view 0 sits at the center. Throws bad_radii unless
/// 0 <= r_min < r_max.
SatelliteLayout satellite(std::span<const std::optional<double>> scores, double r_min, double r_max,
                          Vec2 center = {});

// -------------------------------------------------------- treemap wordle

struct WordInput {
  std::string keyword;
  std::size_t frequency = 1;
};

struct WordBox {
  std::string keyword;
  std::size_t frequency = 0;
  double font_size = 0.0;
  Rect box;
};

inline constexpr double kFontMin = 10.0;
inline constexpr double kFontMax = 28.0;

/// Font size linear in frequency over [kFontMin, kFontMax]; kFontMax when all
/// frequencies are equal.
double font_size(std::size_t frequency, std::size_t lo, std::size_t hi) noexcept;

/// Greedy row packing in descending frequency, rows and block centered.
/// Words too large for the rectangle on their own are dropped; then the
/// lowest-frequency words go until the rest fits.
std::vector<WordBox> place_words(const Rect& rect, std::vector<WordInput> words);

/// Squarified treemap; rectangles come back in input order. Throws
/// invalid_argument for non-positive weights or an empty rectangle.
std::vector<Rect> squarify(std::span<const double> weights, const Rect& rect);

struct ClusterInput {
  int cluster = promptlab::kMiscCluster;
  double weight = 1.0;
  std::vector<WordInput> words;
};

struct ClusterRect {
  int cluster = promptlab::kMiscCluster;
  double weight = 0.0;
  Rect rect;
  std::vector<WordBox> words;
};

struct Section {
  scoring::Dimension dimension{};
  Rect rect;
  std::vector<ClusterRect> clusters;
};

struct TreemapWordle {
  Rect canvas;
  std::vector<Section> sections;  // always 8, table order
};

/// Section width fraction: low-level 1/8.8, high-level 1.2/8.8.
double section_fraction(scoring::Dimension d) noexcept;

TreemapWordle treemap(const std::map<scoring::Dimension, std::vector<ClusterInput>>& sections,
                      const Rect& canvas);

/// Groups keyword stats by section and cluster; cluster weight = cluster size.
std::map<scoring::Dimension, std::vector<ClusterInput>> treemap_inputs(
    std::span<const promptlab::KeywordStat> stats, const promptlab::ClusterResult& clusters);

// ---------------------------------------------------------------- sankey

struct SankeyLink {
  std::string keyword;
  std::string candidate_id;
  int view_index = 0;
  double weight = 0.0;
  double color_index = 0.0;  // 1 - weight: 0 yellow .. 1 purple
};

struct SankeyData {
  double threshold = 0.0;
  std::vector<std::string> keywords;
  std::vector<int> views;
  std::vector<SankeyLink> links;
};

/// Keeps links with weight >= threshold. Throws invalid_argument when the
/// threshold lies outside [0, 1].
SankeyData sankey(std::span<const promptlab::ContributionLink> links, double threshold);

// ---------------------------------------------------------- score series

using PerViewScores =
    std::array<std::array<std::optional<double>, scoring::kDimensionCount>, scoring::kViewCount>;

struct ScoreSeries {
  std::vector<std::string> axis;  // dimension names in table order
  std::vector<std::vector<std::optional<double>>> views;  // [view][dimension]
  std::vector<std::optional<double>> shared;             // model-level markers
};

ScoreSeries score_series(const PerViewScores& per_view, const scoring::ScoreVector& model);

// ------------------------------------------------------------------ json

nlohmann::json to_json(const SatelliteLayout& s);
nlohmann::json to_json(const TreemapWordle& t);
nlohmann::json to_json(const SankeyData& s);
nlohmann::json to_json(const ScoreSeries& s);
nlohmann::json to_json(const Rect& r);

} // namespace forge3d::layout
