#include <algorithm>
#include <numeric>

#include "forge3d/common/error.hpp"
#include "forge3d/layout/layout.hpp"

namespace forge3d::layout {
namespace {

constexpr double kWordGap = 2.0;
constexpr double kClusterInset = 1.0;

struct Sized {
  WordInput word;
  double font = 0.0;
  double w = 0.0;
  double h = 0.0;
};

// Row packing of `words` (already sorted) into `rect`; nullopt if it
// overflows vertically.
std::optional<std::vector<WordBox>> pack(const Rect& rect, const std::vector<Sized>& words) {
  struct Row {
    std::vector<const Sized*> items;
    double width = 0.0;
    double height = 0.0;
  };
  std::vector<Row> rows;
  for (const auto& s : words) {
    if (rows.empty() || rows.back().width + kWordGap + s.w > rect.w) {
      rows.push_back({});
    } else {
      rows.back().width += kWordGap;
    }
    auto& row = rows.back();
    row.items.push_back(&s);
    row.width += s.w;
    row.height = std::max(row.height, s.h);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) total += rows[i].height + (i ? kWordGap : 0.0);
  if (total > rect.h) return std::nullopt;

  std::vector<WordBox> out;
  double y = rect.y + (rect.h - total) / 2.0;
  for (const auto& row : rows) {
    double x = rect.x + (rect.w - row.width) / 2.0;
    for (const auto* s : row.items) {
      const double top = y + (row.height - s->h) / 2.0;
      out.push_back({s->word.keyword, s->word.frequency, s->font, {x, top, s->w, s->h}});
      x += s->w + kWordGap;
    }
    y += row.height + kWordGap;
  }
  return out;
}

} // namespace

double font_size(std::size_t frequency, std::size_t lo, std::size_t hi) noexcept {
  if (hi <= lo) return kFontMax;
  const double t = static_cast<double>(frequency - lo) / static_cast<double>(hi - lo);
  return kFontMin + t * (kFontMax - kFontMin);
}

std::vector<WordBox> place_words(const Rect& rect, std::vector<WordInput> words) {
  if (!(rect.w > 0.0 && rect.h > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "word rectangle is degenerate", "layout");
  }
  if (words.empty()) return {};
  std::stable_sort(words.begin(), words.end(), [](const WordInput& a, const WordInput& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.keyword < b.keyword;
  });
  const std::size_t hi = words.front().frequency;
  const std::size_t lo = words.back().frequency;
  std::vector<Sized> sized;
  for (auto& w : words) {
    Sized s;
    s.font = font_size(w.frequency, lo, hi);
    s.w = 0.6 * s.font * static_cast<double>(std::max<std::size_t>(w.keyword.size(), 1));
    s.h = 1.2 * s.font;
    s.word = std::move(w);
    if (s.w <= rect.w && s.h <= rect.h) sized.push_back(std::move(s));
  }
  while (!sized.empty()) {
    if (auto boxes = pack(rect, sized)) return *boxes;
    sized.pop_back();
  }
  return {};
}

std::vector<Rect> squarify(std::span<const double> weights, const Rect& rect) {
  if (!(rect.w > 0.0 && rect.h > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "treemap rectangle is degenerate", "layout");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::invalid_argument, "treemap weights must be positive", "layout");
    total += w;
  }
  std::vector<Rect> out(weights.size());
  if (weights.empty()) return out;

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  std::vector<double> area(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) area[i] = weights[i] / total * rect.area();

  Rect free = rect;
  std::vector<std::size_t> row;
  const auto worst = [&](const std::vector<std::size_t>& items, double side) {
    double sum = 0.0, mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (const auto i : items) {
      sum += area[i];
      mx = std::max(mx, area[i]);
      mn = std::min(mn, area[i]);
    }
    const double s2 = side * side;
    return std::max(s2 * mx / (sum * sum), (sum * sum) / (s2 * mn));
  };
  const auto lay_row = [&](const std::vector<std::size_t>& items, bool last) {
    double sum = 0.0;
    for (const auto i : items) sum += area[i];
    if (free.w >= free.h) {
      const double width = last ? free.w : sum / free.h;
      double y = free.y;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const double h = k + 1 == items.size() ? free.bottom() - y : area[items[k]] / width;
        out[items[k]] = {free.x, y, width, h};
        y += h;
      }
      free.x += width;
      free.w -= width;
    } else {
      const double height = last ? free.h : sum / free.w;
      double x = free.x;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const double w = k + 1 == items.size() ? free.right() - x : area[items[k]] / height;
        out[items[k]] = {x, free.y, w, height};
        x += w;
      }
      free.y += height;
      free.h -= height;
    }
  };
  for (const auto i : order) {
    const double side = std::min(free.w, free.h);
    auto candidate = row;
    candidate.push_back(i);
    if (row.empty() || worst(candidate, side) <= worst(row, side)) {
      row = std::move(candidate);
    } else {
      lay_row(row, false);
      row = {i};
    }
  }
  lay_row(row, true);
  return out;
}

double section_fraction(scoring::Dimension d) noexcept {
  return (scoring::is_high_level(d) ? 1.2 : 1.0) / 8.8;
}

TreemapWordle treemap(const std::map<scoring::Dimension, std::vector<ClusterInput>>& sections,
                      const Rect& canvas) {
  if (!(canvas.w > 0.0 && canvas.h > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "treemap canvas is degenerate", "layout");
  }
  TreemapWordle out;
  out.canvas = canvas;
  double x = canvas.x;
  for (const auto d : scoring::kAllDimensions) {
    Section section;
    section.dimension = d;
    const double w = d == scoring::kAllDimensions.back() ? canvas.right() - x
                                                          : canvas.w * section_fraction(d);
    section.rect = {x, canvas.y, w, canvas.h};
    x += w;
    if (const auto it = sections.find(d); it != sections.end() && !it->second.empty()) {
      std::vector<double> weights;
      for (const auto& c : it->second) weights.push_back(c.weight);
      const auto rects = squarify(weights, section.rect);
      for (std::size_t i = 0; i < rects.size(); ++i) {
        ClusterRect cr;
        cr.cluster = it->second[i].cluster;
        cr.weight = it->second[i].weight;
        cr.rect = rects[i];
        Rect inner = rects[i];
        if (inner.w > 4 * kClusterInset && inner.h > 4 * kClusterInset) {
          inner = {inner.x + kClusterInset, inner.y + kClusterInset, inner.w - 2 * kClusterInset,
                   inner.h - 2 * kClusterInset};
        }
        if (inner.w > 0.0 && inner.h > 0.0) cr.words = place_words(inner, it->second[i].words);
        section.clusters.push_back(std::move(cr));
      }
    }
    out.sections.push_back(std::move(section));
  }
  return out;
}

std::map<scoring::Dimension, std::vector<ClusterInput>> treemap_inputs(
    std::span<const promptlab::KeywordStat> stats, const promptlab::ClusterResult& clusters) {
  std::map<scoring::Dimension, std::map<int, ClusterInput>> grouped;
  for (const auto& s : stats) {
    if (!s.section) continue;
    auto& ci = grouped[*s.section][s.cluster];
    ci.cluster = s.cluster;
    const std::size_t size = s.cluster == promptlab::kMiscCluster
                                 ? clusters.misc_size
                                 : clusters.sizes.at(static_cast<std::size_t>(s.cluster));
    ci.weight = static_cast<double>(std::max<std::size_t>(size, 1));
    ci.words.push_back({s.keyword, s.frequency});
  }
  std::map<scoring::Dimension, std::vector<ClusterInput>> out;
  for (auto& [d, by_cluster] : grouped) {
    // misc (-1) sorts first in the map; keep real clusters first.
    for (auto& [label, ci] : by_cluster) {
      if (label != promptlab::kMiscCluster) out[d].push_back(std::move(ci));
    }
    if (const auto it = by_cluster.find(promptlab::kMiscCluster); it != by_cluster.end()) {
      out[d].push_back(std::move(it->second));
    }
  }
  return out;
}

} // namespace forge3d::layout
