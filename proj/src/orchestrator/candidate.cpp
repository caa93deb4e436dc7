#include <algorithm>
#include <cmath>
#include <numeric>

#include "forge3d/common/error.hpp"
#include "forge3d/common/parallel.hpp"
#include "forge3d/common/text.hpp"
#include "forge3d/orchestrator/engine.hpp"
#include "forge3d/scoring/clip.hpp"
#include "forge3d/scoring/consistency.hpp"

namespace forge3d::orchestrator {

using scoring::Dimension;
using scoring::Provenance;

void score_candidate(CandidateRecord& c, const scoring::MultiViewSet& set, const ScoringContext& ctx) {
  auto& prov = *ctx.providers;
  const auto& cfg = *ctx.config;
  set.validate();

  try {
    c.gate = scoring::three_d_friendly(set.views.front(), *prov.segmentation, cfg.friendly);
    c.grayed = c.gate->total < cfg.gate_threshold;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::unscorable && e.code() != ErrorCode::no_foreground &&
        e.code() != ErrorCode::empty_mask && e.code() != ErrorCode::provider_error) {
      throw;
    }
    c.gate.reset();
    c.grayed = true;
    c.diagnostics["gate"] = e.what();
  }

  std::vector<scoring::ViewAnalysis> analysis;
  try {
    analysis = scoring::analyze_views(set, *prov.segmentation);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::unscorable) throw;
    c.unscorable = e.what();
    c.diagnostics["consistency"] = e.what();
  }

  if (!analysis.empty()) {
    std::vector<imaging::Histogram> lab, light;
    for (const auto& a : analysis) {
      lab.push_back(a.lab_hist);
      light.push_back(a.light_hist);
    }
    const auto color_pv = scoring::per_view_consistency(lab);
    const auto light_pv = scoring::per_view_consistency(light);
    c.scores.set(Dimension::color_consistency,
                 {scoring::consistency_from_histograms(lab), std::nullopt, Provenance::computed});
    c.scores.set(Dimension::light_consistency,
                 {scoring::consistency_from_histograms(light), std::nullopt, Provenance::computed});
    for (std::size_t v = 0; v < color_pv.size(); ++v) {
      c.per_view[v][index_of(Dimension::color_consistency)] = color_pv[v];
      c.per_view[v][index_of(Dimension::light_consistency)] = light_pv[v];
    }
  }

  std::vector<providers::Embedding> view_embeddings;
  try {
    for (const auto& v : set.views) view_embeddings.push_back(prov.embedding->embed_image(v));
    const auto text = prov.embedding->embed_text(c.prompt);
    const double raw = scoring::cosine(text, view_embeddings.front());
    c.scores.set(Dimension::clip_score, {scoring::normalize_cosine(raw), raw, Provenance::computed});
    const auto ci = scoring::clip_i_from_embeddings(view_embeddings);
    c.scores.set(Dimension::clip_i, {ci.aggregate, ci.raw_mean, Provenance::computed});
    c.clip_i_minimum = ci.minimum;
    for (std::size_t v = 1; v < set.views.size(); ++v) {
      c.per_view[v][index_of(Dimension::clip_i)] = ci.per_view_normalized[v - 1];
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::provider_error && e.code() != ErrorCode::config_error) throw;
    c.diagnostics["embedding"] = e.what();
  }

  std::vector<std::string> hashes;
  for (const auto& v : set.views) hashes.push_back(v.content_hash());
  judge::JudgeOptions jopts;
  jopts.aggregation = cfg.judge_aggregation;
  jopts.max_retries = cfg.judge_max_retries;
  jopts.in_flight = std::max<std::size_t>(1, static_cast<std::size_t>(cfg.providers.judge.in_flight));
  const auto outcome = judge::judge_candidate(set, hashes, c.prompt, *prov.judge, *ctx.tmpl,
                                              cfg.judge_cache ? ctx.cache : nullptr, jopts);
  std::size_t failed_pairs = 0;
  for (const auto& po : outcome.pairs) {
    PairRecord pr;
    pr.metric = std::string(judge::metric_name(po.metric));
    pr.pair_index = po.pair_index;
    pr.views = po.views;
    pr.attempts = po.attempts;
    pr.error = po.error;
    if (po.verdict) {
      pr.raw = po.verdict->raw;
      pr.normalized = po.verdict->normalized;
      pr.rationale = po.verdict->rationale;
    } else {
      ++failed_pairs;
    }
    c.judge_pairs.push_back(std::move(pr));
  }
  if (failed_pairs > 0) {
    c.diagnostics["judge"] = std::to_string(failed_pairs) + " of " + std::to_string(outcome.pairs.size()) +
                             " pair verdicts missing";
  }
  for (const auto m : judge::kAllMetrics) {
    const auto d = judge::to_dimension(m);
    if (const auto s = outcome.score(m)) c.scores.set(d, {*s, *s * 10.0, Provenance::judge});
    for (int v = 0; v < scoring::kViewCount; ++v) c.per_view[static_cast<std::size_t>(v)][index_of(d)] = outcome.per_view(m, v);
  }

  if (!analysis.empty()) {
    const auto regions = outcome.regions_per_view();
    c.defects = scoring::defect_heatmap(analysis, cfg.defect, regions);
  }

  std::vector<std::optional<double>> plaus;
  for (int v = 0; v < scoring::kViewCount; ++v) {
    plaus.push_back(c.per_view[static_cast<std::size_t>(v)][index_of(Dimension::plausibility_3d)]);
  }
  c.satellite = layout::to_json(layout::satellite(plaus, cfg.satellite_r_min, cfg.satellite_r_max));
  c.series = layout::to_json(layout::score_series(c.per_view, c.scores));
}

FusionResult fuse_candidates(std::span<const FusionInput> candidates,
                             const std::optional<providers::Embedding>& prompt) {
  FusionResult r;
  r.order.resize(candidates.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  r.similarity.assign(candidates.size(), std::nullopt);
  bool ok = prompt.has_value();
  for (std::size_t i = 0; ok && i < candidates.size(); ++i) {
    if (!candidates[i].front) {
      ok = false;
      break;
    }
    try {
      r.similarity[i] = scoring::cosine(*prompt, *candidates[i].front);
    } catch (const Error&) {
      ok = false;
    }
  }
  if (!ok) {
    r.fallback = true;
    r.similarity.assign(candidates.size(), std::nullopt);
    return r;
  }
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    if (*r.similarity[a] != *r.similarity[b]) return *r.similarity[a] > *r.similarity[b];
    return candidates[a].id < candidates[b].id;
  });
  return r;
}

KeywordResult compose_prompt(const std::string& current, std::span<const std::string> keywords) {
  if (keywords.empty()) throw Error(ErrorCode::invalid_argument, "no keywords given", "orchestrator");
  KeywordResult r;
  r.prompt = current;
  auto tokens = tokenize(current);
  const auto contains_run = [](const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return needle.empty();
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
  };
  for (const auto& raw : keywords) {
    const auto kw = trim(raw);
    const auto kt = tokenize(kw);
    if (kt.empty()) {
      r.warnings.push_back("ignored empty keyword");
      continue;
    }
    if (contains_run(tokens, kt)) {
      r.warnings.push_back("'" + kw + "' is already in the prompt");
      continue;
    }
    r.prompt += ", " + kw;
    r.appended.push_back(kw);
    tokens.insert(tokens.end(), kt.begin(), kt.end());
  }
  return r;
}

} // namespace forge3d::orchestrator
