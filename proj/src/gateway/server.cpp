#include "forge3d/gateway/server.hpp"

#include <httplib.h>

#include "forge3d/common/text.hpp"
#include "forge3d/layout/layout.hpp"

namespace forge3d::gateway {

using nlohmann::json;
using orchestrator::CandidateRecord;
using orchestrator::Iteration;
using orchestrator::Session;

json ApiError::to_json() const {
  return {{"error", {{"code", code}, {"message", message}, {"stage", stage}, {"retryable", retryable}}}};
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::session_not_found:
  case ErrorCode::iteration_not_found:
  case ErrorCode::candidate_not_found:
  case ErrorCode::keyword_absent: return 404;
  case ErrorCode::invalid_argument:
  case ErrorCode::config_error:
  case ErrorCode::unknown_metric:
  case ErrorCode::malformed:
  case ErrorCode::bad_radii:
  case ErrorCode::range_violation: return 400;
  case ErrorCode::not_ready:
  case ErrorCode::no_scored_candidates: return 409;
  case ErrorCode::empty_mask:
  case ErrorCode::mode_mismatch:
  case ErrorCode::no_foreground:
  case ErrorCode::unscorable:
  case ErrorCode::insufficient_data: return 422;
  case ErrorCode::provider_error:
  case ErrorCode::total_failure: return 502;
  case ErrorCode::version_mismatch:
  case ErrorCode::corrupt_file:
  case ErrorCode::io_error: return 500;
  }
  return 500;
}

ApiError to_api_error(const Error& e) {
  return {std::string(code_name(e.code())), e.what(), e.stage(), e.retryable(), http_status(e.code())};
}

// ------------------------------------------------------------- executor

SerialExecutor::~SerialExecutor() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  work_.notify_all();
  for (auto& [key, lane] : lanes_) {
    if (lane->worker.joinable()) lane->worker.join();
  }
}

void SerialExecutor::submit(const std::string& key, std::function<void()> job) {
  std::lock_guard lock(mutex_);
  auto& lane = lanes_[key];
  if (!lane) {
    lane = std::make_unique<Lane>();
    lane->worker = std::jthread([this, key] { run(key); });
  }
  lane->jobs.push_back(std::move(job));
  work_.notify_all();
}

void SerialExecutor::run(const std::string& key) {
  std::unique_lock lock(mutex_);
  auto& lane = *lanes_.at(key);
  for (;;) {
    work_.wait(lock, [&] { return stopping_ || !lane.jobs.empty(); });
    if (lane.jobs.empty()) return;
    auto job = std::move(lane.jobs.front());
    lane.jobs.pop_front();
    lane.busy = true;
    lock.unlock();
    try {
      job();
    } catch (...) {
      // The job records its own failure in the store.
    }
    lock.lock();
    lane.busy = false;
    idle_.notify_all();
  }
}

void SerialExecutor::drain() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [&] {
    for (const auto& [key, lane] : lanes_) {
      if (lane->busy || !lane->jobs.empty()) return false;
    }
    return true;
  });
}

// ----------------------------------------------------------------- views

namespace {

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

json gate_json(const CandidateRecord& c) {
  if (!c.gate) return nullptr;
  return {{"total", c.gate->total},
          {"co_term", c.gate->co_term},
          {"iou", c.gate->iou},
          {"bbox_iou", c.gate->bbox_iou},
          {"centroid_offset", c.gate->centroid_offset},
          {"max_offset", c.gate->max_offset}};
}

json blob_urls(const CandidateRecord& c) {
  json out = json::array();
  for (const auto& b : c.view_blobs) out.push_back("/blobs/" + b + ".png");
  return out;
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& e) { send(res, e.http_status, e.to_json()); }

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object", "gateway");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, std::string("bad JSON body: ") + e.what(), "gateway");
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, to_api_error(e));
    } catch (const json::exception& e) {
      send_error(res, {"invalid_argument", e.what(), "gateway", false, 400});
    } catch (const std::exception& e) {
      send_error(res, {"io_error", e.what(), "gateway", false, 500});
    }
  };
}

int parse_index(const std::string& text) {
  try {
    std::size_t used = 0;
    const int k = std::stoi(text, &used);
    if (used == text.size()) return k;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::iteration_not_found, "bad iteration index " + text, "gateway");
}

const Iteration& iteration_at(const Session& s, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > s.iterations.size()) {
    throw Error(ErrorCode::iteration_not_found, "no iteration " + std::to_string(k), "gateway");
  }
  return s.iterations[static_cast<std::size_t>(k - 1)];
}

} // namespace

json Api::session_view(const Session& s) const {
  json lineage = json::array();
  for (const auto& p : s.lineage) {
    lineage.push_back({{"id", p.id},
                       {"text", p.text},
                       {"parent", p.parent ? json(*p.parent) : json(nullptr)},
                       {"source", promptlab::source_name(p.source)}});
  }
  json iterations = json::array();
  for (const auto& it : s.iterations) {
    iterations.push_back({{"index", it.index},
                          {"prompt", it.prompt},
                          {"status", orchestrator::status_name(it.status)},
                          {"candidate_count", it.candidates.size()}});
  }
  return {{"id", s.id},
          {"seed", s.seed},
          {"schema_version", s.schema_version},
          {"config", orchestrator::to_json(s.config)},
          {"provider_config_hash", s.provider_config_hash},
          {"corpus_hash", s.corpus_hash},
          {"stopwords_hash", s.stopwords_hash},
          {"template_version", s.template_version},
          {"current_prompt", s.current_prompt},
          {"lineage", lineage},
          {"warnings", s.warnings},
          {"iterations", iterations}};
}

json Api::iteration_view(const Session& s, const Iteration& it) const {
  json candidates = json::array();
  for (const auto& c : it.candidates) {
    candidates.push_back({{"id", c.id},
                          {"branch", providers::branch_name(c.branch)},
                          {"prompt", c.prompt},
                          {"grayed", c.grayed},
                          {"unscorable", c.unscorable ? json(*c.unscorable) : json(nullptr)},
                          {"gate", gate_json(c)},
                          {"fusion_similarity", c.fusion_similarity ? json(*c.fusion_similarity) : json(nullptr)},
                          {"scores", score_table(c.scores)},
                          {"satellite", c.satellite},
                          {"views", blob_urls(c)}});
  }
  json augmented = json::array();
  for (const auto& p : it.augmented) {
    augmented.push_back({{"id", p.id}, {"text", p.text}, {"drift", p.drift}});
  }
  json keywords = json::array();
  for (const auto& k : it.keywords) {
    keywords.push_back({{"keyword", k.keyword},
                        {"frequency", k.frequency},
                        {"cluster", k.cluster == promptlab::kMiscCluster ? json("misc") : json(k.cluster)},
                        {"section", k.section ? json(scoring::dimension_name(*k.section)) : json(nullptr)},
                        {"mean", score_table(k.mean)}});
  }
  json clusters = json::array();
  for (std::size_t i = 0; i < it.candidates.size() && i < it.clusters.labels.size(); ++i) {
    const int label = it.clusters.labels[i];
    clusters.push_back({{"candidate_id", it.candidates[i].id},
                        {"x", it.clusters.points[i].x},
                        {"y", it.clusters.points[i].y},
                        {"cluster", label == promptlab::kMiscCluster ? json("misc") : json(label)}});
  }
  return {{"session_id", s.id},
          {"index", it.index},
          {"prompt", it.prompt},
          {"status", orchestrator::status_name(it.status)},
          {"options",
           {{"n", it.options.n}, {"generation", it.options.generation}, {"retrieval", it.options.retrieval}}},
          {"augmented", augmented},
          {"warnings", it.warnings},
          {"diagnostics", it.diagnostics},
          {"fusion_fallback", it.fusion_fallback},
          {"candidates", candidates},
          {"clusters", clusters},
          {"keywords", keywords}};
}

json Api::candidate_view(const Session& s, const Iteration& it, const CandidateRecord& c) const {
  const auto full = orchestrator::to_json(c);
  return {{"id", c.id},
          {"session_id", s.id},
          {"iteration", it.index},
          {"branch", providers::branch_name(c.branch)},
          {"source_ref", c.source_ref},
          {"prompt", c.prompt},
          {"grayed", c.grayed},
          {"unscorable", c.unscorable ? json(*c.unscorable) : json(nullptr)},
          {"gate", gate_json(c)},
          {"scores", score_table(c.scores)},
          {"clip_i_minimum", c.clip_i_minimum ? json(*c.clip_i_minimum) : json(nullptr)},
          {"per_view", full.at("per_view")},
          {"defects", full.at("defects")},
          {"judge_pairs", full.at("judge_pairs")},
          {"satellite", c.satellite},
          {"series", c.series},
          {"views", blob_urls(c)},
          {"mesh_ref", c.mesh_ref ? json(*c.mesh_ref) : json(nullptr)},
          {"diagnostics", c.diagnostics}};
}

void Api::mount(httplib::Server& server) {
  auto& engine = engine_;

  server.Get("/healthz", guarded([&engine](const httplib::Request&, httplib::Response& res) {
    const auto report = engine.health();
    json providers = json::object();
    for (const auto& [name, h] : report.providers) {
      providers[name] = {{"status", providers::health_name(h.status)},
                         {"latency_ms", h.latency_ms},
                         {"detail", h.detail}};
    }
    send(res, 200, {{"status", providers::health_name(report.overall)}, {"providers", providers}});
  }));

  server.Post("/sessions", guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    std::optional<std::uint64_t> seed;
    if (body.contains("seed") && !body.at("seed").is_null()) {
      if (!body.at("seed").is_number_unsigned()) {
        throw Error(ErrorCode::invalid_argument, "seed must be a non-negative integer", "gateway");
      }
      seed = body.at("seed").get<std::uint64_t>();
    }
    std::optional<orchestrator::EngineConfig> config;
    if (body.contains("config") && !body.at("config").is_null()) {
      auto merged = orchestrator::to_json(engine.defaults());
      merged.merge_patch(body.at("config"));
      config = orchestrator::engine_config_from_json(merged);
    }
    for (const auto& [k, v] : body.items()) {
      if (k != "seed" && k != "config") throw Error(ErrorCode::invalid_argument, "unknown field " + k, "gateway");
    }
    send(res, 201, session_view(engine.create_session(seed, config)));
  }));

  server.Get(R"(/sessions/([A-Za-z0-9]+))",
             guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, session_view(engine.load(req.matches[1])));
             }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/iterations)",
              guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
                const std::string sid = req.matches[1];
                const auto body = parse_body(req);
                if (!body.contains("prompt") || !body.at("prompt").is_string()) {
                  throw Error(ErrorCode::invalid_argument, "prompt is required", "gateway");
                }
                orchestrator::IterationOptions opts;
                opts.n = engine.load(sid).config.n;
                if (body.contains("n") && !body.at("n").is_null()) opts.n = body.at("n").get<std::size_t>();
                if (body.contains("branches") && !body.at("branches").is_null()) {
                  opts.generation = opts.retrieval = false;
                  for (const auto& b : body.at("branches")) {
                    const auto branch = providers::parse_branch(b.get<std::string>());
                    if (!branch) throw Error(ErrorCode::invalid_argument, "unknown branch " + b.dump(), "gateway");
                    (*branch == providers::Branch::generation ? opts.generation : opts.retrieval) = true;
                  }
                }
                for (const auto& [k, v] : body.items()) {
                  if (k != "prompt" && k != "n" && k != "branches") {
                    throw Error(ErrorCode::invalid_argument, "unknown field " + k, "gateway");
                  }
                }
                const int index = engine.begin_iteration(sid, body.at("prompt").get<std::string>(), opts);
                executor_.submit(sid, [&engine, sid, index] { engine.execute_iteration(sid, index); });
                res.set_header("Location", "/sessions/" + sid + "/iterations/" + std::to_string(index));
                send(res, 202, {{"session_id", sid}, {"index", index}, {"status", "pending"}});
              }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/iterations/([^/]+))",
             guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
               const auto s = engine.load(req.matches[1]);
               send(res, 200, iteration_view(s, iteration_at(s, parse_index(req.matches[2]))));
             }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/iterations/([^/]+)/treemap)",
             guarded([&engine](const httplib::Request& req, httplib::Response& res) {
               const auto s = engine.load(req.matches[1]);
               const auto& it = iteration_at(s, parse_index(req.matches[2]));
               if (it.status != orchestrator::Status::ready) {
                 throw Error(ErrorCode::not_ready, "iteration is " + std::string(status_name(it.status)), "gateway");
               }
               send(res, 200, it.treemap);
             }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/iterations/([^/]+)/report)",
             guarded([&engine](const httplib::Request& req, httplib::Response& res) {
               const auto s = engine.load(req.matches[1]);
               send(res, 200, orchestrator::export_report(s, parse_index(req.matches[2])));
             }));

  server.Post(R"(/sessions/([A-Za-z0-9]+)/prompt/keywords)",
              guarded([&engine](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.contains("keywords") || !body.at("keywords").is_array()) {
                  throw Error(ErrorCode::invalid_argument, "keywords array is required", "gateway");
                }
                const auto keywords = body.at("keywords").get<std::vector<std::string>>();
                const auto r = engine.apply_keyword(req.matches[1], keywords);
                send(res, 200, {{"prompt", r.prompt}, {"appended", r.appended}, {"warnings", r.warnings}});
              }));

  server.Get(R"(/sessions/([A-Za-z0-9]+)/recommendations)",
             guarded([&engine](const httplib::Request& req, httplib::Response& res) {
               std::vector<scoring::Dimension> focus;
               if (req.has_param("focus")) {
                 std::string text = req.get_param_value("focus");
                 std::size_t start = 0;
                 while (start <= text.size()) {
                   const auto end = std::min(text.find(',', start), text.size());
                   const auto name = trim(std::string_view(text).substr(start, end - start));
                   if (!name.empty()) {
                     const auto d = scoring::parse_dimension(name);
                     if (!d) throw Error(ErrorCode::unknown_metric, "unknown dimension " + name, "gateway");
                     focus.push_back(*d);
                   }
                   start = end + 1;
                 }
               }
               const auto recs = engine.recommend(req.matches[1], focus);
               json list = json::array();
               for (const auto& r : recs) {
                 list.push_back({{"keyword", r.keyword}, {"rank", r.rank}, {"frequency", r.frequency}});
               }
               json names = json::array();
               for (const auto d : focus) names.push_back(scoring::dimension_name(d));
               send(res, 200, {{"focus", names}, {"recommendations", list}});
             }));

  server.Get(R"(/candidates/([A-Za-z0-9-]+))",
             guarded([this, &engine](const httplib::Request& req, httplib::Response& res) {
               const auto ref = engine.find_candidate(req.matches[1]);
               const auto& it = ref.session.iterations[ref.iteration];
               send(res, 200, candidate_view(ref.session, it, it.candidates[ref.candidate]));
             }));

  server.Get(R"(/candidates/([A-Za-z0-9-]+)/contribution)",
             guarded([&engine](const httplib::Request& req, httplib::Response& res) {
               if (!req.has_param("keyword") || trim(req.get_param_value("keyword")).empty()) {
                 throw Error(ErrorCode::invalid_argument, "keyword is required", "gateway");
               }
               double threshold = 0.0;
               if (req.has_param("threshold")) {
                 try {
                   threshold = std::stod(req.get_param_value("threshold"));
                 } catch (const std::exception&) {
                   throw Error(ErrorCode::invalid_argument, "threshold must be a number", "gateway");
                 }
               }
               const auto links = engine.contribution(req.matches[1], req.get_param_value("keyword"));
               auto body = layout::to_json(layout::sankey(links, threshold));
               body["candidate_id"] = std::string(req.matches[1]);
               send(res, 200, body);
             }));

  server.Get(R"(/blobs/([0-9a-f]{64})\.png)",
             guarded([&engine](const httplib::Request& req, httplib::Response& res) {
               const auto path = engine.store().root() / "blobs" / (std::string(req.matches[1]) + ".png");
               if (!std::filesystem::exists(path)) {
                 throw Error(ErrorCode::io_error, "no blob " + std::string(req.matches[1]), "gateway");
               }
               std::ifstream in(path, std::ios::binary);
               std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
               res.set_content(bytes, "image/png");
             }));
}

bool serve(orchestrator::Engine& engine, const std::string& host, int port,
           const std::function<void(httplib::Server&)>& on_ready) {
  httplib::Server server;
  Api api(engine);
  api.mount(server);
  if (!server.bind_to_port(host, port)) return false;
  if (on_ready) on_ready(server);
  const bool ok = server.listen_after_bind();
  api.drain();
  return ok;
}

} // namespace forge3d::gateway
