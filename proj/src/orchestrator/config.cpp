#include <fstream>
#include <set>

#include "forge3d/common/error.hpp"
#include "forge3d/orchestrator/types.hpp"

namespace forge3d::orchestrator {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, where + " must be an object", "config");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw Error(ErrorCode::config_error, "unknown key " + where + "." + k, "config");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

void EngineConfig::validate() const {
  const auto bad = [](const std::string& m) { throw Error(ErrorCode::config_error, m, "config"); };
  if (n < 4 || n > 64) bad("n must lie in [4, 64]");
  if (retrieval_k > 64) bad("retrieval_k must be at most 64");
  if (!(gate_threshold >= 0.0 && gate_threshold <= 1.0)) bad("gate_threshold must lie in [0, 1]");
  friendly.weights.validate();
  if (defect.grid < 1 || defect.grid > 64) bad("defect.grid must lie in [1, 64]");
  if (judge_max_retries < 0) bad("judge.max_retries must be >= 0");
  if (min_cluster_size < 2) bad("min_cluster_size must be >= 2");
  if (top_k == 0) bad("top_k must be >= 1");
  if (!(satellite_r_min >= 0.0 && satellite_r_min < satellite_r_max)) bad("satellite radii need 0 <= r_min < r_max");
  if (!(treemap_canvas.w > 0.0 && treemap_canvas.h > 0.0)) bad("treemap canvas must have positive area");
}

EngineConfig engine_config_from_json(const json& j) {
  EngineConfig c;
  try {
    reject_unknown(j, {"providers", "n", "retrieval_k", "gate_threshold", "friendly", "defect", "judge",
                       "min_cluster_size", "top_k", "workers", "satellite", "treemap_canvas"},
                   "config");
    if (j.contains("providers")) c.providers = providers::providers_config_from_json(j.at("providers"));
    read(j, "n", c.n);
    read(j, "retrieval_k", c.retrieval_k);
    read(j, "gate_threshold", c.gate_threshold);
    if (j.contains("friendly")) {
      const auto& f = j.at("friendly");
      reject_unknown(f, {"weights", "offset_source"}, "friendly");
      if (f.contains("weights")) {
        const auto& w = f.at("weights");
        reject_unknown(w, {"offset", "iou", "bbox"}, "friendly.weights");
        read(w, "offset", c.friendly.weights.offset);
        read(w, "iou", c.friendly.weights.iou);
        read(w, "bbox", c.friendly.weights.bbox);
      }
      if (f.contains("offset_source")) {
        const auto src = f.at("offset_source").get<std::string>();
        if (src == "segmentation") c.friendly.offset_source = scoring::OffsetSource::segmentation;
        else if (src == "saliency") c.friendly.offset_source = scoring::OffsetSource::saliency;
        else throw Error(ErrorCode::config_error, "unknown offset_source " + src, "config");
      }
    }
    if (j.contains("defect")) {
      const auto& d = j.at("defect");
      reject_unknown(d, {"grid", "patch_threshold", "flag_fraction"}, "defect");
      read(d, "grid", c.defect.grid);
      read(d, "patch_threshold", c.defect.patch_threshold);
      read(d, "flag_fraction", c.defect.flag_fraction);
    }
    if (j.contains("judge")) {
      const auto& jj = j.at("judge");
      reject_unknown(jj, {"aggregation", "max_retries", "cache"}, "judge");
      if (jj.contains("aggregation")) {
        const auto a = jj.at("aggregation").get<std::string>();
        if (a == "mean") c.judge_aggregation = judge::Aggregation::mean;
        else if (a == "median") c.judge_aggregation = judge::Aggregation::median;
        else throw Error(ErrorCode::config_error, "unknown aggregation " + a, "config");
      }
      read(jj, "max_retries", c.judge_max_retries);
      read(jj, "cache", c.judge_cache);
    }
    read(j, "min_cluster_size", c.min_cluster_size);
    read(j, "top_k", c.top_k);
    read(j, "workers", c.workers);
    if (j.contains("satellite")) {
      const auto& s = j.at("satellite");
      reject_unknown(s, {"r_min", "r_max"}, "satellite");
      read(s, "r_min", c.satellite_r_min);
      read(s, "r_max", c.satellite_r_max);
    }
    if (j.contains("treemap_canvas")) {
      const auto& t = j.at("treemap_canvas");
      reject_unknown(t, {"w", "h"}, "treemap_canvas");
      read(t, "w", c.treemap_canvas.w);
      read(t, "h", c.treemap_canvas.h);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("bad config value: ") + e.what(), "config");
  }
  c.validate();
  return c;
}

json to_json(const EngineConfig& c) {
  return {{"providers", providers::to_json(c.providers)},
          {"n", c.n},
          {"retrieval_k", c.retrieval_k},
          {"gate_threshold", c.gate_threshold},
          {"friendly",
           {{"weights",
             {{"offset", c.friendly.weights.offset},
              {"iou", c.friendly.weights.iou},
              {"bbox", c.friendly.weights.bbox}}},
            {"offset_source",
             c.friendly.offset_source == scoring::OffsetSource::segmentation ? "segmentation" : "saliency"}}},
          {"defect",
           {{"grid", c.defect.grid},
            {"patch_threshold", c.defect.patch_threshold},
            {"flag_fraction", c.defect.flag_fraction}}},
          {"judge",
           {{"aggregation", c.judge_aggregation == judge::Aggregation::mean ? "mean" : "median"},
            {"max_retries", c.judge_max_retries},
            {"cache", c.judge_cache}}},
          {"min_cluster_size", c.min_cluster_size},
          {"top_k", c.top_k},
          {"workers", c.workers},
          {"satellite", {{"r_min", c.satellite_r_min}, {"r_max", c.satellite_r_max}}},
          {"treemap_canvas", {{"w", c.treemap_canvas.w}, {"h", c.treemap_canvas.h}}}};
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config " + path.string(), "config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config_error, path.string() + ": " + e.what(), "config");
  }
  return engine_config_from_json(j);
}

} // namespace forge3d::orchestrator
