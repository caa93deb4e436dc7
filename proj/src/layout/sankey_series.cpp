#include <set>

#include "forge3d/common/error.hpp"
#include "forge3d/layout/layout.hpp"

namespace forge3d::layout {

SankeyData sankey(std::span<const promptlab::ContributionLink> links, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "sankey threshold outside [0, 1]", "layout");
  }
  SankeyData out;
  out.threshold = threshold;
  std::set<std::string> keywords;
  std::set<int> views;
  for (const auto& l : links) {
    keywords.insert(l.keyword);
    views.insert(l.view_index);
    if (l.weight >= threshold) {
      out.links.push_back({l.keyword, l.candidate_id, l.view_index, l.weight, 1.0 - l.weight});
    }
  }
  out.keywords.assign(keywords.begin(), keywords.end());
  out.views.assign(views.begin(), views.end());
  return out;
}

ScoreSeries score_series(const PerViewScores& per_view, const scoring::ScoreVector& model) {
  ScoreSeries s;
  for (const auto d : scoring::kAllDimensions) {
    s.axis.emplace_back(scoring::dimension_name(d));
    s.shared.push_back(model.value(d));
  }
  for (const auto& view : per_view) {
    s.views.emplace_back(view.begin(), view.end());
  }
  return s;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const Vec2& v) { return {{"x", v.x}, {"y", v.y}}; }

nlohmann::json to_json(const WordBox& w) {
  return {{"keyword", w.keyword}, {"frequency", w.frequency}, {"font_size", w.font_size},
          {"box", layout::to_json(w.box)}};
}

} // namespace

nlohmann::json to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

nlohmann::json to_json(const SatelliteLayout& s) {
  nlohmann::json sats = nlohmann::json::array();
  for (const auto& sat : s.satellites) {
    sats.push_back({{"view", sat.view},
                    {"angle_deg", sat.angle_deg},
                    {"radius", sat.radius},
                    {"position", to_json(sat.position)},
                    {"color_index", sat.color_index},
                    {"score", opt(sat.score)},
                    {"hollow", sat.hollow}});
  }
  return {{"center", to_json(s.center)}, {"center_score", opt(s.center_score)},
          {"r_min", s.r_min},            {"r_max", s.r_max},
          {"satellites", sats}};
}

nlohmann::json to_json(const TreemapWordle& t) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& sec : t.sections) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : sec.clusters) {
      nlohmann::json words = nlohmann::json::array();
      for (const auto& w : c.words) words.push_back(to_json(w));
      clusters.push_back({{"cluster", c.cluster == promptlab::kMiscCluster ? nlohmann::json("misc")
                                                                             : nlohmann::json(c.cluster)},
                          {"weight", c.weight},
                          {"rect", to_json(c.rect)},
                          {"words", words}});
    }
    sections.push_back({{"dimension", scoring::dimension_name(sec.dimension)},
                        {"high_level", scoring::is_high_level(sec.dimension)},
                        {"rect", to_json(sec.rect)},
                        {"clusters", clusters}});
  }
  return {{"canvas", to_json(t.canvas)}, {"sections", sections}};
}

nlohmann::json to_json(const SankeyData& s) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : s.links) {
    links.push_back({{"keyword", l.keyword},
                     {"candidate_id", l.candidate_id},
                     {"view", l.view_index},
                     {"weight", l.weight},
                     {"color_index", l.color_index}});
  }
  return {{"threshold", s.threshold}, {"keywords", s.keywords}, {"views", s.views}, {"links", links}};
}

nlohmann::json to_json(const ScoreSeries& s) {
  nlohmann::json views = nlohmann::json::array();
  for (std::size_t v = 0; v < s.views.size(); ++v) {
    nlohmann::json ys = nlohmann::json::array();
    for (const auto& y : s.views[v]) ys.push_back(opt(y));
    views.push_back({{"view", v}, {"values", ys}});
  }
  nlohmann::json shared = nlohmann::json::array();
  for (const auto& y : s.shared) shared.push_back(opt(y));
  return {{"axis", s.axis}, {"views", views}, {"shared", shared}};
}

} // namespace forge3d::layout
