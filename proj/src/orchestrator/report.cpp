#include "forge3d/common/error.hpp"
#include "forge3d/orchestrator/engine.hpp"
#include "forge3d/scoring/bland_altman.hpp"

namespace forge3d::orchestrator {
namespace {

using nlohmann::json;

json score_table(const scoring::ScoreVector& v) {
  json out = json::object();
  for (const auto d : scoring::kAllDimensions) {
    const auto& dv = v[d];
    out[std::string(scoring::dimension_name(d))] = {
        {"value", dv.value ? json(*dv.value) : json(nullptr)},
        {"raw", dv.raw ? json(*dv.raw) : json(nullptr)},
        {"status", dv.present() ? scoring::provenance_name(dv.provenance) : "missing"}};
  }
  return out;
}

json candidate_entry(const CandidateRecord& c) {
  json flagged = json::array();
  if (c.defects) {
    for (std::size_t v = 0; v < c.defects->views.size(); ++v) {
      if (c.defects->views[v].flagged) flagged.push_back(v);
    }
  }
  json gate = nullptr;
  if (c.gate) {
    gate = {{"total", c.gate->total}, {"co_term", c.gate->co_term}, {"iou", c.gate->iou},
            {"bbox_iou", c.gate->bbox_iou}};
  }
  json blobs = json::array();
  for (const auto& b : c.view_blobs) blobs.push_back("blobs/" + b + ".png");
  return {{"id", c.id},
          {"branch", providers::branch_name(c.branch)},
          {"prompt", c.prompt},
          {"grayed", c.grayed},
          {"unscorable", c.unscorable ? json(*c.unscorable) : json(nullptr)},
          {"gate", gate},
          {"scores", score_table(c.scores)},
          {"clip_i_minimum", c.clip_i_minimum ? json(*c.clip_i_minimum) : json(nullptr)},
          {"flagged_views", flagged},
          {"views", blobs}};
}

} // namespace

json candidate_report(const CandidateRecord& c, const std::string& template_version) {
  auto entry = candidate_entry(c);
  entry["schema"] = "forge3d.candidate-report/1";
  entry["template_version"] = template_version;
  entry["dimensions"] = json::array();
  for (const auto d : scoring::kAllDimensions) entry["dimensions"].push_back(scoring::dimension_name(d));
  entry["defects"] = c.defects ? to_json(*c.defects) : json(nullptr);
  entry["judge_pairs"] = to_json(c).at("judge_pairs");
  entry["per_view"] = to_json(c).at("per_view");
  entry["diagnostics"] = c.diagnostics;

  entry["candidate_id"] = c.id;
  entry["three_d_friendly"] = entry["gate"];
  if (c.gate) entry["three_d_friendly"]["passed"] = !c.grayed;
  json vector = json::object();
  for (const auto& [name, cell] : entry["scores"].items()) {
    vector[name] = {{"value", cell["value"]}, {"raw", cell["raw"]}, {"provenance", cell["status"]}};
  }
  entry["score_vector"] = vector;
  json flags = json::array();
  if (c.defects) {
    for (const auto& v : c.defects->views) flags.push_back(v.flagged);
  }
  entry["defect_map"] = {{"grid", c.defects ? c.defects->grid : 0}, {"flags", flags}};
  return entry;
}

json export_report(const Session& s, int iteration,
                   const std::map<std::string, std::map<std::string, double>>* reference) {
  if (iteration < 1 || static_cast<std::size_t>(iteration) > s.iterations.size()) {
    throw Error(ErrorCode::iteration_not_found, "no iteration " + std::to_string(iteration), "report");
  }
  const auto& it = s.iterations[static_cast<std::size_t>(iteration - 1)];
  if (it.status != Status::ready) {
    throw Error(ErrorCode::not_ready, "iteration " + std::to_string(iteration) + " is " +
                                          std::string(status_name(it.status)),
                "report");
  }
  json candidates = json::array();
  for (const auto& c : it.candidates) candidates.push_back(candidate_entry(c));
  json dims = json::array();
  for (const auto d : scoring::kAllDimensions) dims.push_back(scoring::dimension_name(d));

  json ba = nullptr;
  if (reference != nullptr) {
    ba = json::object();
    for (const auto d : scoring::kAllDimensions) {
      const std::string name(scoring::dimension_name(d));
      std::vector<std::pair<double, double>> pairs;
      for (const auto& c : it.candidates) {
        const auto v = c.scores.value(d);
        const auto ref = reference->find(c.id);
        if (!v || ref == reference->end()) continue;
        const auto r = ref->second.find(name);
        if (r != ref->second.end()) pairs.emplace_back(*v, r->second);
      }
      if (pairs.size() < 2) continue;
      const auto b = scoring::bland_altman(pairs);
      ba[name] = {{"n", b.n},         {"mean_diff", b.mean_diff}, {"sd", b.sd},
                  {"lower", b.lower}, {"upper", b.upper},         {"fraction_inside", b.fraction_inside}};
    }
  }
  return {{"schema", "forge3d.report/1"},
          {"session_id", s.id},
          {"seed", s.seed},
          {"iteration", it.index},
          {"prompt", it.prompt},
          {"template_version", s.template_version},
          {"provider_config_hash", s.provider_config_hash},
          {"corpus_hash", s.corpus_hash},
          {"gate_threshold", s.config.gate_threshold},
          {"dimensions", dims},
          {"candidates", candidates},
          {"bland_altman", ba}};
}

} // namespace forge3d::orchestrator
