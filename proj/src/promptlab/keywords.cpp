#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "forge3d/common/error.hpp"
#include "forge3d/common/text.hpp"
#include "forge3d/imaging/saliency.hpp"
#include "forge3d/promptlab/promptlab.hpp"

namespace forge3d::promptlab {

using scoring::Dimension;
using scoring::ScoreVector;

std::vector<KeywordCount> extract_keywords(const std::vector<std::vector<std::string>>& token_lists,
                                           std::span<const std::string> stopwords,
                                           std::size_t top_k) {
  const std::set<std::string, std::less<>> stop(stopwords.begin(), stopwords.end());
  std::map<std::string, std::size_t> counts;
  for (const auto& tokens : token_lists) {
    for (const auto& t : tokens) {
      const auto lower = to_lower(t);
      if (lower.size() < 3 || stop.contains(lower)) continue;
      ++counts[lower];
    }
  }
  std::vector<KeywordCount> out;
  out.reserve(counts.size());
  for (const auto& [k, c] : counts) out.push_back({k, c});
  // counts is ordered, so a stable sort keeps ties lexicographic
  std::stable_sort(out.begin(), out.end(),
                   [](const KeywordCount& a, const KeywordCount& b) { return a.frequency > b.frequency; });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

bool contains_token(std::span<const std::string> tokens, std::string_view keyword) noexcept {
  // Tokens are lowercase already.
  return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
    return t.size() == keyword.size() &&
           std::equal(t.begin(), t.end(), keyword.begin(), [](char a, char b) {
             return a == static_cast<char>(std::tolower(static_cast<unsigned char>(b)));
           });
  });
}

ScoreVector keyword_score(std::string_view keyword, std::span<const ScoredPrompt> candidates) {
  std::array<double, scoring::kDimensionCount> sum{};
  std::array<std::size_t, scoring::kDimensionCount> count{};
  std::size_t containing = 0;
  for (const auto& c : candidates) {
    if (!contains_token(c.tokens, keyword)) continue;
    ++containing;
    for (const auto d : scoring::kAllDimensions) {
      if (const auto v = c.scores.value(d)) {
        sum[static_cast<std::size_t>(index_of(d))] += *v;
        ++count[static_cast<std::size_t>(index_of(d))];
      }
    }
  }
  if (containing == 0) {
    throw Error(ErrorCode::keyword_absent, "no candidate prompt contains '" + std::string(keyword) + "'",
                "promptlab");
  }
  ScoreVector mean;
  for (const auto d : scoring::kAllDimensions) {
    const auto i = static_cast<std::size_t>(index_of(d));
    if (count[i] == 0) continue;
    mean.set(d, {sum[i] / static_cast<double>(count[i]), std::nullopt,
                 is_high_level(d) ? scoring::Provenance::judge : scoring::Provenance::computed});
  }
  return mean;
}

std::optional<Dimension> argmax_dimension(const ScoreVector& v) noexcept {
  std::optional<Dimension> best;
  for (const auto d : scoring::kAllDimensions) {
    const auto x = v.value(d);
    if (x && (!best || *x > *v.value(*best))) best = d;
  }
  return best;
}

std::vector<KeywordStat> keyword_stats(std::span<const ScoredPrompt> candidates,
                                       const ClusterResult& clusters,
                                       std::span<const std::string> stopwords, std::size_t top_k) {
  if (clusters.labels.size() != candidates.size()) {
    throw Error(ErrorCode::invalid_argument, "cluster labels do not match candidates", "promptlab");
  }
  std::vector<int> labels;
  for (std::size_t c = 0; c < clusters.cluster_count(); ++c) labels.push_back(static_cast<int>(c));
  if (clusters.misc_size > 0) labels.push_back(kMiscCluster);

  std::vector<KeywordStat> stats;
  for (const int label : labels) {
    std::vector<std::vector<std::string>> token_lists;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (clusters.labels[i] == label) token_lists.push_back(candidates[i].tokens);
    }
    for (auto& kc : extract_keywords(token_lists, stopwords, top_k)) {
      KeywordStat s;
      s.mean = keyword_score(kc.keyword, candidates);
      s.section = argmax_dimension(s.mean);
      s.keyword = std::move(kc.keyword);
      s.frequency = kc.frequency;
      s.cluster = label;
      stats.push_back(std::move(s));
    }
  }
  return stats;
}

std::vector<Recommendation> recommend(std::span<const KeywordStat> stats, std::string_view current_prompt,
                                      std::span<const Dimension> focus) {
  const auto prompt_tokens = tokenize(current_prompt);
  const std::vector<Dimension> dims = focus.empty()
                                          ? std::vector<Dimension>(scoring::kAllDimensions.begin(),
                                                                   scoring::kAllDimensions.end())
                                          : std::vector<Dimension>(focus.begin(), focus.end());
  // A keyword can head several clusters; its score is the same, frequencies add.
  std::map<std::string, std::pair<const KeywordStat*, std::size_t>> merged;
  for (const auto& s : stats) {
    auto [it, inserted] = merged.try_emplace(s.keyword, &s, 0);
    it->second.second += s.frequency;
  }
  std::vector<Recommendation> out;
  for (const auto& [keyword, entry] : merged) {
    if (contains_token(prompt_tokens, keyword)) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto d : dims) {
      if (const auto v = entry.first->mean.value(d)) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) continue;
    out.push_back({keyword, sum / static_cast<double>(n), entry.second});
  }
  std::stable_sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.keyword < b.keyword;
  });
  return out;
}

std::vector<ContributionLink> contribution(std::string_view keyword, const std::string& candidate_id,
                                           std::string_view prompt,
                                           std::span<const imaging::RasterImage> views,
                                           std::span<const imaging::BinaryMask> masks,
                                           providers::AttentionProvider& attention) {
  if (views.size() != masks.size()) {
    throw Error(ErrorCode::invalid_argument, "views and masks differ in count", "promptlab");
  }
  std::vector<ContributionLink> links;
  for (std::size_t v = 0; v < views.size(); ++v) {
    imaging::ScalarMap map;
    try {
      map = attention.attention(keyword, prompt, views[v], static_cast<int>(v));
    } catch (const providers::ProviderError&) {
      continue;
    }
    if (map.width != masks[v].width() || map.height != masks[v].height()) {
      throw Error(ErrorCode::invalid_argument, "attention map size differs from the view", "promptlab");
    }
    double weight = 0.0;
    try {
      weight = imaging::mask_iou(imaging::threshold_otsu(map), masks[v]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_foreground) throw;
    }
    links.push_back({std::string(keyword), candidate_id, static_cast<int>(v), weight});
  }
  return links;
}

} // namespace forge3d::promptlab
