#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge3d/imaging/mask.hpp"
#include "forge3d/providers/interfaces.hpp"
#include "forge3d/scoring/score_vector.hpp"

namespace forge3d::promptlab {

enum class PromptSource { user, augmented, keyword_merge };
std::string_view source_name(PromptSource s) noexcept;
std::optional<PromptSource> parse_source(std::string_view name) noexcept;

struct PromptRecord {
  std::string id;
  std::string text;
  std::optional<std::string> parent;
  PromptSource source = PromptSource::user;
  std::vector<std::string> tokens;
  bool drift = false;  // shares no content token with its parent

  /// Tokenizes `text`; throws invalid_argument on blank text.
  static PromptRecord make(std::string id, std::string text, std::optional<std::string> parent,
                           PromptSource source);
  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

/// One entry per non-blank line; lines starting with '#' are comments. The
/// hash covers the raw file bytes.
struct TextAsset {
  std::vector<std::string> entries;
  std::string hash;
};
TextAsset load_text_asset(const std::filesystem::path& path);

struct Assets {
  TextAsset modifiers;
  TextAsset stopwords;
};
/// Reads corpus_3d_modifiers.txt and stopwords.txt from `dir`.
Assets load_assets(const std::filesystem::path& dir);

// ---------------------------------------------------------------- augment

struct AugmentOptions {
  std::size_t n = 16;
  std::uint64_t seed = 0;
  int refill_attempts = 3;
};

struct AugmentResult {
  std::vector<PromptRecord> prompts;
  std::vector<std::string> warnings;
  bool fallback = false;  // provider failed, corpus templates used
};

/// Expands t0 into up to n distinct prompts (case-insensitive). Throws
/// invalid_argument when n is outside [4, 64].
AugmentResult augment(const PromptRecord& t0, providers::LlmProvider& llm,
                      std::span<const std::string> corpus, const AugmentOptions& options);

/// Provider-free augmentation: t0 followed by one or two corpus modifiers.
std::vector<std::string> corpus_templates(const std::string& t0, std::size_t n,
                                          std::span<const std::string> corpus, std::uint64_t seed);

// ---------------------------------------------------------- projection

/// PCA onto the two leading components. Component signs are fixed so that the
/// largest-magnitude loading is positive. Throws insufficient_data for < 2.
std::vector<imaging::Point2> project_2d(const std::vector<providers::Embedding>& embeddings);
std::vector<imaging::Point2> project_2d(std::span<const PromptRecord> prompts,
                                        providers::EmbeddingProvider& emb);

// ---------------------------------------------------------- clustering

inline constexpr int kMiscCluster = -1;

struct ClusterResult {
  std::vector<imaging::Point2> points;
  std::vector<int> labels;  // per point; kMiscCluster for noise
  std::vector<std::size_t> sizes;  // per cluster label
  std::size_t misc_size = 0;

  std::size_t cluster_count() const noexcept { return sizes.size(); }
  friend bool operator==(const ClusterResult&, const ClusterResult&) = default;
};

/// HDBSCAN (excess-of-mass selection, single cluster allowed). `ids` fix a
/// canonical point order so the result does not depend on input order;
/// cluster labels are numbered by the lowest id they contain.
ClusterResult cluster(const std::vector<imaging::Point2>& points,
                      const std::vector<std::string>& ids, std::size_t min_cluster_size = 3);

// ------------------------------------------------------------ keywords

struct KeywordCount {
  std::string keyword;
  std::size_t frequency = 0;
  friend bool operator==(const KeywordCount&, const KeywordCount&) = default;
};

/// Most frequent tokens (length >= 3, not stopwords), ties lexicographic.
std::vector<KeywordCount> extract_keywords(const std::vector<std::vector<std::string>>& token_lists,
                                           std::span<const std::string> stopwords,
                                           std::size_t top_k = 12);

struct ScoredPrompt {
  std::string candidate_id;
  std::vector<std::string> tokens;
  scoring::ScoreVector scores;
};

bool contains_token(std::span<const std::string> tokens, std::string_view keyword) noexcept;

/// Per-dimension mean over candidates whose token list contains `keyword`,
/// skipping missing values. Throws keyword_absent if none contains it.
scoring::ScoreVector keyword_score(std::string_view keyword, std::span<const ScoredPrompt> candidates);

struct ContributionLink {
  std::string keyword;
  std::string candidate_id;
  int view_index = 0;
  double weight = 0.0;
  friend bool operator==(const ContributionLink&, const ContributionLink&) = default;
};

struct KeywordStat {
  std::string keyword;
  std::size_t frequency = 0;
  int cluster = kMiscCluster;
  scoring::ScoreVector mean;
  std::optional<scoring::Dimension> section;  // argmax present dimension
  std::vector<ContributionLink> contributions;
  friend bool operator==(const KeywordStat&, const KeywordStat&) = default;
};

std::optional<scoring::Dimension> argmax_dimension(const scoring::ScoreVector& v) noexcept;

/// Keywords per cluster (misc included) with their containment means.
/// `clusters.labels` is parallel to `candidates`.
std::vector<KeywordStat> keyword_stats(std::span<const ScoredPrompt> candidates,
                                       const ClusterResult& clusters,
                                       std::span<const std::string> stopwords,
                                       std::size_t top_k = 12);

struct Recommendation {
  std::string keyword;
  double rank = 0.0;
  std::size_t frequency = 0;
  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// Keywords ranked by their mean over the present focus dimensions (all eight
/// when `focus` is empty). Keywords already in the prompt, and keywords with
/// no present focus value, are left out.
std::vector<Recommendation> recommend(std::span<const KeywordStat> stats,
                                      std::string_view current_prompt,
                                      std::span<const scoring::Dimension> focus);

/// Attention map thresholded at its Otsu level versus each view's foreground
/// mask. Views whose attention call fails are omitted.
std::vector<ContributionLink> contribution(std::string_view keyword, const std::string& candidate_id,
                                           std::string_view prompt,
                                           std::span<const imaging::RasterImage> views,
                                           std::span<const imaging::BinaryMask> masks,
                                           providers::AttentionProvider& attention);

} // namespace forge3d::promptlab
