#include "forge3d/common/error.hpp"
#include "forge3d/orchestrator/types.hpp"

namespace forge3d::orchestrator {
namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json to_json(const promptlab::PromptRecord& p) {
  return {{"id", p.id},
          {"text", p.text},
          {"parent", opt(p.parent)},
          {"source", promptlab::source_name(p.source)},
          {"tokens", p.tokens},
          {"drift", p.drift}};
}

promptlab::PromptRecord prompt_from_json(const json& j) {
  promptlab::PromptRecord p;
  p.id = j.at("id").get<std::string>();
  p.text = j.at("text").get<std::string>();
  p.parent = get_opt<std::string>(j, "parent");
  const auto src = promptlab::parse_source(j.at("source").get<std::string>());
  if (!src) throw Error(ErrorCode::corrupt_file, "unknown prompt source", "store");
  p.source = *src;
  p.tokens = j.at("tokens").get<std::vector<std::string>>();
  p.drift = j.at("drift").get<bool>();
  return p;
}

scoring::ScoreVector score_vector_from_json(const json& j) {
  scoring::ScoreVector v;
  for (const auto d : scoring::kAllDimensions) {
    const auto& e = j.at(std::string(scoring::dimension_name(d)));
    scoring::DimensionValue dv;
    dv.value = get_opt<double>(e, "value");
    dv.raw = get_opt<double>(e, "raw");
    const auto p = scoring::parse_provenance(e.at("provenance").get<std::string>());
    if (!p) throw Error(ErrorCode::corrupt_file, "unknown provenance", "store");
    dv.provenance = *p;
    v.set(d, dv);
  }
  return v;
}

json to_json(const scoring::ThreeDFriendlyScore& g) {
  return {{"co_term", g.co_term},
          {"iou", g.iou},
          {"bbox_iou", g.bbox_iou},
          {"total", g.total},
          {"centroid_offset", g.centroid_offset},
          {"max_offset", g.max_offset},
          {"weights", {{"offset", g.weights.offset}, {"iou", g.weights.iou}, {"bbox", g.weights.bbox}}}};
}

scoring::ThreeDFriendlyScore gate_from_json(const json& j) {
  scoring::ThreeDFriendlyScore g;
  g.co_term = j.at("co_term").get<double>();
  g.iou = j.at("iou").get<double>();
  g.bbox_iou = j.at("bbox_iou").get<double>();
  g.total = j.at("total").get<double>();
  g.centroid_offset = j.at("centroid_offset").get<double>();
  g.max_offset = j.at("max_offset").get<double>();
  const auto& w = j.at("weights");
  g.weights = {w.at("offset").get<double>(), w.at("iou").get<double>(), w.at("bbox").get<double>()};
  return g;
}

scoring::DefectMap defects_from_json(const json& j) {
  scoring::DefectMap d;
  d.grid = j.at("grid").get<int>();
  for (const auto& v : j.at("views")) {
    scoring::ViewDefects vd;
    vd.deviation = v.at("deviation").get<std::vector<double>>();
    vd.covered = v.at("covered").get<std::vector<bool>>();
    vd.flagged = v.at("flagged").get<bool>();
    vd.judge_override = v.at("judge_override").get<bool>();
    d.views.push_back(std::move(vd));
  }
  return d;
}

json to_json(const PairRecord& p) {
  return {{"metric", p.metric},         {"pair_index", p.pair_index}, {"views", p.views},
          {"raw", opt(p.raw)},          {"normalized", opt(p.normalized)},
          {"rationale", p.rationale},   {"attempts", p.attempts},     {"error", p.error}};
}

PairRecord pair_from_json(const json& j) {
  PairRecord p;
  p.metric = j.at("metric").get<std::string>();
  p.pair_index = j.at("pair_index").get<int>();
  p.views = j.at("views").get<std::array<int, 2>>();
  p.raw = get_opt<int>(j, "raw");
  p.normalized = get_opt<double>(j, "normalized");
  p.rationale = j.at("rationale").get<std::string>();
  p.attempts = j.at("attempts").get<int>();
  p.error = j.at("error").get<std::string>();
  return p;
}

json per_view_json(const layout::PerViewScores& pv) {
  json out = json::array();
  for (const auto& view : pv) {
    json row = json::array();
    for (const auto& v : view) row.push_back(opt(v));
    out.push_back(row);
  }
  return out;
}

layout::PerViewScores per_view_from_json(const json& j) {
  layout::PerViewScores pv{};
  if (j.size() != pv.size()) throw Error(ErrorCode::corrupt_file, "per_view needs 9 rows", "store");
  for (std::size_t v = 0; v < pv.size(); ++v) {
    if (j[v].size() != pv[v].size()) throw Error(ErrorCode::corrupt_file, "per_view row size", "store");
    for (std::size_t d = 0; d < pv[v].size(); ++d) {
      if (!j[v][d].is_null()) pv[v][d] = j[v][d].get<double>();
    }
  }
  return pv;
}

json to_json(const IterationOptions& o) {
  return {{"n", o.n}, {"generation", o.generation}, {"retrieval", o.retrieval}};
}

IterationOptions options_from_json(const json& j) {
  return {j.at("n").get<std::size_t>(), j.at("generation").get<bool>(), j.at("retrieval").get<bool>()};
}

promptlab::ClusterResult clusters_from_json(const json& j) {
  promptlab::ClusterResult c;
  for (const auto& p : j.at("points")) c.points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
  c.labels = j.at("labels").get<std::vector<int>>();
  c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  c.misc_size = j.at("misc_size").get<std::size_t>();
  return c;
}

promptlab::KeywordStat keyword_from_json(const json& j) {
  promptlab::KeywordStat k;
  k.keyword = j.at("keyword").get<std::string>();
  k.frequency = j.at("frequency").get<std::size_t>();
  k.cluster = j.at("cluster").is_string() ? promptlab::kMiscCluster : j.at("cluster").get<int>();
  k.mean = score_vector_from_json(j.at("mean"));
  if (const auto s = get_opt<std::string>(j, "section")) k.section = scoring::parse_dimension(*s);
  for (const auto& l : j.at("contributions")) {
    k.contributions.push_back({l.at("keyword").get<std::string>(), l.at("candidate_id").get<std::string>(),
                               l.at("view").get<int>(), l.at("weight").get<double>()});
  }
  return k;
}

Iteration iteration_from_json(const json& j) {
  Iteration it;
  it.index = j.at("index").get<int>();
  it.prompt = j.at("prompt").get<std::string>();
  it.prompt_id = j.at("prompt_id").get<std::string>();
  it.options = options_from_json(j.at("options"));
  it.status = parse_status(j.at("status").get<std::string>());
  for (const auto& p : j.at("augmented")) it.augmented.push_back(prompt_from_json(p));
  it.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& c : j.at("candidates")) it.candidates.push_back(candidate_from_json(c));
  it.fusion_fallback = j.at("fusion_fallback").get<bool>();
  it.clusters = clusters_from_json(j.at("clusters"));
  for (const auto& k : j.at("keywords")) it.keywords.push_back(keyword_from_json(k));
  it.treemap = j.at("treemap");
  it.diagnostics = j.at("diagnostics").get<std::map<std::string, std::string>>();
  return it;
}

} // namespace

std::string_view status_name(Status s) noexcept {
  switch (s) {
  case Status::pending: return "pending";
  case Status::generating: return "generating";
  case Status::scoring: return "scoring";
  case Status::ready: return "ready";
  case Status::failed: return "failed";
  }
  return "failed";
}

Status parse_status(std::string_view name) {
  for (const auto s : {Status::pending, Status::generating, Status::scoring, Status::ready, Status::failed}) {
    if (status_name(s) == name) return s;
  }
  throw Error(ErrorCode::corrupt_file, "unknown status " + std::string(name), "store");
}

json to_json(const scoring::ScoreVector& v) {
  json out = json::object();
  for (const auto d : scoring::kAllDimensions) {
    const auto& dv = v[d];
    out[std::string(scoring::dimension_name(d))] = {
        {"value", opt(dv.value)}, {"raw", opt(dv.raw)}, {"provenance", scoring::provenance_name(dv.provenance)}};
  }
  return out;
}

json to_json(const scoring::DefectMap& d) {
  json views = json::array();
  for (const auto& v : d.views) {
    views.push_back({{"deviation", v.deviation},
                     {"covered", v.covered},
                     {"flagged", v.flagged},
                     {"judge_override", v.judge_override}});
  }
  return {{"grid", d.grid}, {"views", views}};
}

json to_json(const promptlab::KeywordStat& k) {
  json links = json::array();
  for (const auto& l : k.contributions) {
    links.push_back({{"keyword", l.keyword}, {"candidate_id", l.candidate_id}, {"view", l.view_index},
                     {"weight", l.weight}});
  }
  return {{"keyword", k.keyword},
          {"frequency", k.frequency},
          {"cluster", k.cluster == promptlab::kMiscCluster ? json("misc") : json(k.cluster)},
          {"mean", to_json(k.mean)},
          {"section", k.section ? json(scoring::dimension_name(*k.section)) : json(nullptr)},
          {"contributions", links}};
}

json to_json(const promptlab::ClusterResult& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back({{"x", p.x}, {"y", p.y}});
  return {{"points", points}, {"labels", c.labels}, {"sizes", c.sizes}, {"misc_size", c.misc_size}};
}

json to_json(const CandidateRecord& c) {
  return {{"id", c.id},
          {"branch", providers::branch_name(c.branch)},
          {"source_ref", c.source_ref},
          {"prompt_id", c.prompt_id},
          {"prompt", c.prompt},
          {"tokens", c.tokens},
          {"view_blobs", c.view_blobs},
          {"mesh_ref", opt(c.mesh_ref)},
          {"gate", c.gate ? to_json(*c.gate) : json(nullptr)},
          {"grayed", c.grayed},
          {"unscorable", opt(c.unscorable)},
          {"scores", to_json(c.scores)},
          {"clip_i_minimum", opt(c.clip_i_minimum)},
          {"per_view", per_view_json(c.per_view)},
          {"defects", c.defects ? to_json(*c.defects) : json(nullptr)},
          {"judge_pairs",
           [&] {
             json a = json::array();
             for (const auto& p : c.judge_pairs) a.push_back(to_json(p));
             return a;
           }()},
          {"diagnostics", c.diagnostics},
          {"satellite", c.satellite},
          {"series", c.series},
          {"fusion_similarity", opt(c.fusion_similarity)}};
}

CandidateRecord candidate_from_json(const json& j) {
  CandidateRecord c;
  c.id = j.at("id").get<std::string>();
  const auto b = providers::parse_branch(j.at("branch").get<std::string>());
  if (!b) throw Error(ErrorCode::corrupt_file, "unknown branch", "store");
  c.branch = *b;
  c.source_ref = j.at("source_ref").get<std::string>();
  c.prompt_id = j.at("prompt_id").get<std::string>();
  c.prompt = j.at("prompt").get<std::string>();
  c.tokens = j.at("tokens").get<std::vector<std::string>>();
  c.view_blobs = j.at("view_blobs").get<std::vector<std::string>>();
  c.mesh_ref = get_opt<std::string>(j, "mesh_ref");
  if (!j.at("gate").is_null()) c.gate = gate_from_json(j.at("gate"));
  c.grayed = j.at("grayed").get<bool>();
  c.unscorable = get_opt<std::string>(j, "unscorable");
  c.scores = score_vector_from_json(j.at("scores"));
  c.clip_i_minimum = get_opt<double>(j, "clip_i_minimum");
  c.per_view = per_view_from_json(j.at("per_view"));
  if (!j.at("defects").is_null()) c.defects = defects_from_json(j.at("defects"));
  for (const auto& p : j.at("judge_pairs")) c.judge_pairs.push_back(pair_from_json(p));
  c.diagnostics = j.at("diagnostics").get<std::map<std::string, std::string>>();
  c.satellite = j.at("satellite");
  c.series = j.at("series");
  c.fusion_similarity = get_opt<double>(j, "fusion_similarity");
  return c;
}

json to_json(const Iteration& it) {
  json augmented = json::array();
  for (const auto& p : it.augmented) augmented.push_back(to_json(p));
  json candidates = json::array();
  for (const auto& c : it.candidates) candidates.push_back(to_json(c));
  json keywords = json::array();
  for (const auto& k : it.keywords) keywords.push_back(to_json(k));
  return {{"index", it.index},
          {"prompt", it.prompt},
          {"prompt_id", it.prompt_id},
          {"options", to_json(it.options)},
          {"status", status_name(it.status)},
          {"augmented", augmented},
          {"warnings", it.warnings},
          {"candidates", candidates},
          {"fusion_fallback", it.fusion_fallback},
          {"clusters", to_json(it.clusters)},
          {"keywords", keywords},
          {"treemap", it.treemap},
          {"diagnostics", it.diagnostics}};
}

json to_json(const Session& s) {
  json lineage = json::array();
  for (const auto& p : s.lineage) lineage.push_back(to_json(p));
  json commands = json::array();
  for (const auto& c : s.commands) {
    commands.push_back(
        {{"kind", c.kind}, {"prompt", c.prompt}, {"options", to_json(c.options)}, {"keywords", c.keywords}});
  }
  json iterations = json::array();
  for (const auto& it : s.iterations) iterations.push_back(to_json(it));
  return {{"schema_version", s.schema_version},
          {"id", s.id},
          {"seed", s.seed},
          {"config", to_json(s.config)},
          {"provider_config_hash", s.provider_config_hash},
          {"corpus_hash", s.corpus_hash},
          {"stopwords_hash", s.stopwords_hash},
          {"template_version", s.template_version},
          {"lineage", lineage},
          {"current_prompt", s.current_prompt},
          {"current_prompt_id", opt(s.current_prompt_id)},
          {"selection", opt(s.selection)},
          {"commands", commands},
          {"warnings", s.warnings},
          {"iterations", iterations}};
}

Session session_from_json(const json& j) {
  Session s;
  try {
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version > kSchemaVersion) {
      throw Error(ErrorCode::version_mismatch,
                  "session schema " + std::to_string(s.schema_version) + " is newer than supported " +
                      std::to_string(kSchemaVersion),
                  "store");
    }
    s.id = j.at("id").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.config = engine_config_from_json(j.at("config"));
    s.provider_config_hash = j.at("provider_config_hash").get<std::string>();
    s.corpus_hash = j.at("corpus_hash").get<std::string>();
    s.stopwords_hash = j.at("stopwords_hash").get<std::string>();
    s.template_version = j.at("template_version").get<std::string>();
    for (const auto& p : j.at("lineage")) s.lineage.push_back(prompt_from_json(p));
    s.current_prompt = j.at("current_prompt").get<std::string>();
    s.current_prompt_id = get_opt<std::string>(j, "current_prompt_id");
    s.selection = get_opt<std::string>(j, "selection");
    for (const auto& c : j.at("commands")) {
      s.commands.push_back({c.at("kind").get<std::string>(), c.at("prompt").get<std::string>(),
                            options_from_json(c.at("options")),
                            c.at("keywords").get<std::vector<std::string>>()});
    }
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& it : j.at("iterations")) s.iterations.push_back(iteration_from_json(it));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt_file, std::string("session document: ") + e.what(), "store");
  }
  return s;
}

} // namespace forge3d::orchestrator
