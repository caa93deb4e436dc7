#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge3d/providers/interfaces.hpp"
#include "forge3d/scoring/defect.hpp"
#include "forge3d/scoring/dimensions.hpp"
#include "forge3d/scoring/multiview.hpp"
#include "forge3d/scoring/score_vector.hpp"

namespace forge3d::judge {

enum class Metric { text_image_alignment, plausibility_3d, texture_geometry, low_level_texture };

inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::text_image_alignment, Metric::plausibility_3d, Metric::texture_geometry,
    Metric::low_level_texture};

std::string_view metric_name(Metric m) noexcept;
/// Throws unknown_metric.
Metric parse_metric(std::string_view name);
scoring::Dimension to_dimension(Metric m) noexcept;

struct CalibrationExample {
  std::string high;
  std::string low;
};

/// Instructions sent to the judge. The version id is derived from the full
/// text, so editing any part of it invalidates cached verdicts.
struct JudgeTemplate {
  std::string task_definition;
  std::map<std::string, std::string> criteria;  // metric name -> what to assess
  std::map<std::string, CalibrationExample> calibration;
  std::vector<std::string> rubric_steps;
  std::string output_format;

  std::string version() const;
  std::string render(Metric metric, std::string_view prompt_text) const;
};

const JudgeTemplate& default_template();

/// Consecutive views by yaw: (0,1), (1,2), ..., (7,8).
std::vector<std::array<int, 2>> view_pairs();

struct JudgeRequest {
  providers::JudgeCall call;
  std::string cache_key;  // template version / metric / hashA_hashB
};

/// `hashes` holds content hashes parallel to set.views.
JudgeRequest build_request(Metric metric, std::array<int, 2> pair, const scoring::MultiViewSet& set,
                           std::span<const std::string> hashes, std::string_view prompt_text,
                           const JudgeTemplate& tmpl);

/// The provider wire body: {template_text, images: [2 x base64 PNG], metric}.
std::string to_wire_json(const providers::JudgeCall& call);

struct JudgeVerdict {
  Metric metric = Metric::plausibility_3d;
  int raw = 0;  // 1..10
  double normalized = 0.0;
  std::string rationale;
  std::vector<scoring::RegionRect> regions;
  int pair_index = 0;
  bool fallback_parse = false;
};

/// Strict JSON first, then "first integer 1-10 plus remaining text".
/// Throws malformed when both fail.
JudgeVerdict parse_verdict(std::string_view response, Metric metric);

std::string verdict_to_json(const JudgeVerdict& v);
JudgeVerdict verdict_from_json(std::string_view text);

/// Memory cache with optional on-disk mirror at
/// <root>/<template_version>/<metric>/<hashA>_<hashB>.json.
class VerdictCache {
public:
  explicit VerdictCache(std::optional<std::filesystem::path> root = std::nullopt)
      : root_(std::move(root)) {}

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const std::string& verdict_json);
  std::size_t hits() const;

private:
  std::optional<std::filesystem::path> root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> memory_;
  std::size_t hits_ = 0;
};

enum class Aggregation { mean, median };

struct JudgeOptions {
  Aggregation aggregation = Aggregation::mean;
  int max_retries = 2;        // extra attempts after a malformed response
  std::size_t in_flight = 4;  // concurrent requests per candidate
};

struct PairOutcome {
  Metric metric = Metric::plausibility_3d;
  int pair_index = 0;
  std::array<int, 2> views{};
  std::optional<JudgeVerdict> verdict;  // nullopt: missing for this pair
  int attempts = 0;
  bool cached = false;
  std::string error;
};

struct JudgeOutcome {
  scoring::HighLevelScores scores;
  std::vector<PairOutcome> pairs;  // metric-major, pair order

  std::optional<double> score(Metric m) const noexcept;
  /// Mean normalized verdict of pairs containing `view` for metric m.
  std::optional<double> per_view(Metric m, int view) const;
  /// Judge-reported defect regions per view (union across metrics).
  std::vector<std::vector<scoring::RegionRect>> regions_per_view() const;
};

JudgeOutcome judge_candidate(const scoring::MultiViewSet& set, std::span<const std::string> hashes,
                             std::string_view prompt_text, providers::JudgeProvider& provider,
                             const JudgeTemplate& tmpl, VerdictCache* cache = nullptr,
                             const JudgeOptions& options = {});

} // namespace forge3d::judge
