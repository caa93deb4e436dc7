#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge3d/judge/judge.hpp"
#include "forge3d/layout/layout.hpp"
#include "forge3d/promptlab/promptlab.hpp"
#include "forge3d/providers/config.hpp"
#include "forge3d/scoring/defect.hpp"
#include "forge3d/scoring/three_d_friendly.hpp"

namespace forge3d::orchestrator {

inline constexpr int kSchemaVersion = 1;

struct EngineConfig {
  providers::ProvidersConfig providers;
  std::size_t n = 16;                 // augmented prompts per iteration
  std::size_t retrieval_k = 16;       // retrieved candidates per iteration
  double gate_threshold = 0.5;
  scoring::FriendlyOptions friendly;
  scoring::DefectOptions defect;
  judge::Aggregation judge_aggregation = judge::Aggregation::mean;
  int judge_max_retries = 2;
  bool judge_cache = true;
  std::size_t min_cluster_size = 3;
  std::size_t top_k = 12;
  std::size_t workers = 0;            // 0: hardware concurrency
  double satellite_r_min = 60.0;
  double satellite_r_max = 140.0;
  layout::Rect treemap_canvas{0.0, 0.0, 1200.0, 600.0};

  /// Throws config_error for out-of-range values.
  void validate() const;
  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Unknown keys are rejected; absent keys keep their defaults.
EngineConfig engine_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EngineConfig& c);
EngineConfig load_engine_config(const std::filesystem::path& path);

enum class Status { pending, generating, scoring, ready, failed };
std::string_view status_name(Status s) noexcept;
Status parse_status(std::string_view name);

struct PairRecord {
  std::string metric;
  int pair_index = 0;
  std::array<int, 2> views{};
  std::optional<int> raw;
  std::optional<double> normalized;
  std::string rationale;
  int attempts = 0;
  std::string error;
  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct CandidateRecord {
  std::string id;
  providers::Branch branch = providers::Branch::generation;
  std::string source_ref;  // fixture id for retrieved candidates
  std::string prompt_id;
  std::string prompt;
  std::vector<std::string> tokens;
  std::vector<std::string> view_blobs;  // sha256 of each view's PNG
  std::optional<std::string> mesh_ref;

  std::optional<scoring::ThreeDFriendlyScore> gate;
  bool grayed = false;
  std::optional<std::string> unscorable;  // reason when no foreground was found

  scoring::ScoreVector scores;
  std::optional<double> clip_i_minimum;
  layout::PerViewScores per_view{};
  std::optional<scoring::DefectMap> defects;
  std::vector<PairRecord> judge_pairs;
  std::map<std::string, std::string> diagnostics;  // stage -> message

  nlohmann::json satellite;  // layout::SatelliteLayout
  nlohmann::json series;     // layout::ScoreSeries
  std::optional<double> fusion_similarity;

  friend bool operator==(const CandidateRecord&, const CandidateRecord&) = default;
};

struct IterationOptions {
  std::size_t n = 16;
  bool generation = true;
  bool retrieval = true;
  friend bool operator==(const IterationOptions&, const IterationOptions&) = default;
};

struct Iteration {
  int index = 1;
  std::string prompt;
  std::string prompt_id;
  IterationOptions options;
  Status status = Status::pending;
  std::vector<promptlab::PromptRecord> augmented;
  std::vector<std::string> warnings;
  std::vector<CandidateRecord> candidates;  // fused gallery order
  bool fusion_fallback = false;
  promptlab::ClusterResult clusters;        // parallel to candidates
  std::vector<promptlab::KeywordStat> keywords;
  nlohmann::json treemap;
  std::map<std::string, std::string> diagnostics;

  friend bool operator==(const Iteration&, const Iteration&) = default;
};

/// One user command; replay re-executes these in order.
struct Command {
  std::string kind;  // "iteration" | "keywords"
  std::string prompt;
  IterationOptions options;
  std::vector<std::string> keywords;
  friend bool operator==(const Command&, const Command&) = default;
};

struct Session {
  int schema_version = kSchemaVersion;
  std::string id;
  std::uint64_t seed = 0;
  EngineConfig config;
  std::string provider_config_hash;
  std::string corpus_hash;
  std::string stopwords_hash;
  std::string template_version;
  std::vector<promptlab::PromptRecord> lineage;
  std::string current_prompt;
  std::optional<std::string> current_prompt_id;
  std::optional<std::string> selection;
  std::vector<Command> commands;
  std::vector<std::string> warnings;
  std::vector<Iteration> iterations;

  friend bool operator==(const Session&, const Session&) = default;
};

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);  // throws version_mismatch / corrupt_file

nlohmann::json to_json(const CandidateRecord& c);
CandidateRecord candidate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Iteration& it);
nlohmann::json to_json(const scoring::ScoreVector& v);
nlohmann::json to_json(const scoring::DefectMap& d);
nlohmann::json to_json(const promptlab::KeywordStat& k);
nlohmann::json to_json(const promptlab::ClusterResult& c);

} // namespace forge3d::orchestrator
