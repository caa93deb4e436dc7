#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "forge3d/orchestrator/types.hpp"
#include "forge3d/providers/registry.hpp"

namespace forge3d::orchestrator {

/// Store layout: <root>/sessions/<id>.json, <root>/blobs/<sha256>.png,
/// <root>/cache/judge/... Files are written to a temporary name and renamed.
class Store {
public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path judge_cache_dir() const { return root_ / "cache" / "judge"; }

  std::string put_blob(const imaging::RasterImage& img);
  imaging::RasterImage get_blob(const std::string& sha) const;

  void save(const Session& s);
  /// Throws session_not_found, version_mismatch or corrupt_file.
  Session load(const std::string& id) const;
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;

private:
  std::filesystem::path root_;
};

/// Scoring of one nine-view candidate, independent of any session.
struct ScoringContext {
  providers::ProviderSet* providers = nullptr;
  const EngineConfig* config = nullptr;
  judge::VerdictCache* cache = nullptr;
  const judge::JudgeTemplate* tmpl = nullptr;
};

/// Fills gate, scores, per-view values, defects, judge pairs and layouts.
/// Never throws for provider trouble; failures land in diagnostics and
/// missing dimensions.
void score_candidate(CandidateRecord& c, const scoring::MultiViewSet& set, const ScoringContext& ctx);

struct FusionInput {
  std::string id;
  std::optional<providers::Embedding> front;  // nullopt if embedding failed
};

struct FusionResult {
  std::vector<std::size_t> order;  // indices into the input
  std::vector<std::optional<double>> similarity;
  bool fallback = false;           // insertion order used
};

/// Cosine of each front view to the prompt embedding, descending; ties by id.
FusionResult fuse_candidates(std::span<const FusionInput> candidates,
                             const std::optional<providers::Embedding>& prompt);

struct KeywordResult {
  std::string prompt;
  std::vector<std::string> appended;
  std::vector<std::string> warnings;
};

/// current + ", " + keywords in selection order. Keywords already in the
/// prompt are skipped with a warning.
KeywordResult compose_prompt(const std::string& current, std::span<const std::string> keywords);

class Engine {
public:
  Engine(std::filesystem::path store_root, EngineConfig defaults, std::filesystem::path assets_dir,
         std::uint64_t default_seed = 0);

  Store& store() noexcept { return store_; }
  const EngineConfig& defaults() const noexcept { return defaults_; }

  /// Id = hash of (seed, number of sessions already in the store).
  Session create_session(std::optional<std::uint64_t> seed = std::nullopt,
                         std::optional<EngineConfig> config = std::nullopt,
                         std::optional<std::string> id = std::nullopt);
  Session load(const std::string& id) const { return store_.load(id); }

  /// Appends a pending iteration and persists it; returns its index.
  int begin_iteration(const std::string& session_id, const std::string& prompt, IterationOptions options);
  /// Runs a pending iteration to ready or failed, persisting each status.
  Iteration execute_iteration(const std::string& session_id, int index);
  Iteration run_iteration(const std::string& session_id, const std::string& prompt,
                          IterationOptions options);

  KeywordResult apply_keyword(const std::string& session_id, std::span<const std::string> keywords);

  /// Recommendations from the latest ready iteration. Throws
  /// no_scored_candidates when no iteration has a present score.
  std::vector<promptlab::Recommendation> recommend(const std::string& session_id,
                                                   std::span<const scoring::Dimension> focus) const;

  struct CandidateRef {
    Session session;
    std::size_t iteration = 0;  // position in session.iterations
    std::size_t candidate = 0;
  };
  CandidateRef find_candidate(const std::string& candidate_id) const;

  std::vector<promptlab::ContributionLink> contribution(const std::string& candidate_id,
                                                        const std::string& keyword);

  providers::HealthReport health() const;

private:
  friend struct EngineAccess;
  std::shared_ptr<providers::ProviderSet> providers_for(const Session& s);
  std::mutex& session_mutex(const std::string& id);
  void run_pipeline(Session& s, std::size_t position, const std::function<void()>& persist);

  Store store_;
  EngineConfig defaults_;
  promptlab::Assets assets_;
  std::uint64_t default_seed_;
  judge::VerdictCache cache_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> session_mutexes_;
  std::map<std::string, std::shared_ptr<providers::ProviderSet>> provider_sets_;
};

/// Export document for one ready iteration. `reference` maps candidate id to
/// reference scores per dimension name; when given, a Bland-Altman block is
/// added for every dimension with at least two paired values.
nlohmann::json export_report(const Session& s, int iteration,
                             const std::map<std::string, std::map<std::string, double>>* reference = nullptr);

/// Report for one candidate outside any session (score-batch output).
nlohmann::json candidate_report(const CandidateRecord& c, const std::string& template_version);

struct ReplayResult {
  bool identical = false;
  std::vector<std::string> differences;  // JSON pointer paths
};

/// Re-executes the session's commands in a scratch store and compares the
/// resulting documents.
ReplayResult replay(const Session& original, const std::filesystem::path& assets_dir,
                    const std::filesystem::path& scratch_root);

} // namespace forge3d::orchestrator
