#include <doctest.h>

#include <httplib.h>

#include <set>
#include <thread>

#include "../support/engine_fixture.hpp"
#include "../support/schema.hpp"
#include "forge3d/gateway/server.hpp"

using namespace forge3d;
using forge3d::testing::SchemaSet;
using forge3d::testing::small_config;
using forge3d::testing::TempDir;
using nlohmann::json;

namespace {

const SchemaSet& schemas() {
  static const SchemaSet set(FORGE3D_SCHEMA_DIR);
  return set;
}

void conforms(const std::string& schema, const json& body) {
  const auto errors = schemas().validate(schema, body);
  for (const auto& e : errors) MESSAGE(schema << ": " << e);
  CHECK(errors.empty());
}

/// One engine + API on an ephemeral port.
struct Service {
  orchestrator::Engine engine;
  gateway::Api api{engine};
  httplib::Server server;
  int port = 0;
  std::thread thread;

  Service(const std::filesystem::path& store, std::uint64_t seed = 1)
      : engine(store, small_config(), FORGE3D_ASSETS_DIR, seed) {
    api.mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Service() {
    server.stop();
    thread.join();
    api.drain();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

struct Reply {
  int status = 0;
  json body;
  std::string raw;
  std::string location;
};

Reply get(const Service& s, const std::string& path) {
  auto res = s.client().Get(path);
  REQUIRE(res);
  Reply r{res->status, nullptr, res->body, res->get_header_value("Location")};
  if (res->get_header_value("Content-Type") == "application/json") r.body = json::parse(res->body);
  return r;
}

Reply post(const Service& s, const std::string& path, const json& body) {
  auto res = s.client().Post(path, body.dump(), "application/json");
  REQUIRE(res);
  return {res->status, json::parse(res->body), res->body, res->get_header_value("Location")};
}

void expect_error(const Reply& r, int status, const std::string& code) {
  CHECK(r.status == status);
  conforms("error.json", r.body);
  CHECK(r.body["error"]["code"] == code);
}

const json kSmall = {{"n", 4}, {"retrieval_k", 4}, {"providers", {{"render_size", 64}}}};

} // namespace

TEST_CASE("published schemas load and reject bad documents") {
  CHECK(schemas().size() >= 14);
  CHECK(schemas().validate("error.json", {{"error", {{"code", "x"}}}}).size() == 3);
  CHECK_FALSE(schemas().validate("iteration_accepted.json", {{"session_id", "s"}, {"index", 0}, {"status", "ready"}}).empty());
  CHECK_FALSE(schemas().validate("treemap.json", {{"canvas", {{"x", 0}, {"y", 0}, {"w", -1}, {"h", 1}}}, {"sections", json::array()}}).empty());
  CHECK_FALSE(schemas().validate("config.json", {{"judge", {{"aggregation", "mode"}}}}).empty());
  CHECK(schemas().validate("config.json", {{"n", 8}, {"providers", {{"judge", {{"kind", "http"}, {"endpoint", "http://x"}}}}}}).empty());
}

TEST_CASE("error mapping") {
  CHECK(gateway::http_status(ErrorCode::session_not_found) == 404);
  CHECK(gateway::http_status(ErrorCode::not_ready) == 409);
  CHECK(gateway::http_status(ErrorCode::config_error) == 400);
  CHECK(gateway::http_status(ErrorCode::total_failure) == 502);
  const auto e = gateway::to_api_error(Error(ErrorCode::provider_error, "boom", "judge", true));
  CHECK(e.code == "provider_error");
  CHECK(e.retryable);
  conforms("error.json", e.to_json());
}

TEST_CASE("sessions and validation errors") {
  TempDir dir("gw-sessions");
  Service svc(dir.path);

  const auto health = get(svc, "/healthz");
  CHECK(health.status == 200);
  conforms("health.json", health.body);
  CHECK(health.body["status"] == "ok");

  const auto created = post(svc, "/sessions", {{"seed", 5}, {"config", kSmall}});
  CHECK(created.status == 201);
  conforms("session.json", created.body);
  CHECK(created.body["seed"] == 5);
  CHECK(created.body["config"]["n"] == 4);
  const std::string sid = created.body["id"];

  const auto fetched = get(svc, "/sessions/" + sid);
  CHECK(fetched.status == 200);
  CHECK(fetched.body["iterations"].empty());
  CHECK(fetched.body == created.body);
  conforms("config.json", fetched.body["config"]);

  expect_error(get(svc, "/sessions/nope"), 404, "session_not_found");
  expect_error(post(svc, "/sessions", {{"colour", 1}}), 400, "invalid_argument");
  expect_error(post(svc, "/sessions", {{"seed", -3}}), 400, "invalid_argument");
  expect_error(post(svc, "/sessions", {{"config", {{"gate_treshold", 0.4}}}}), 400, "config_error");
  expect_error(post(svc, "/sessions/" + sid + "/iterations", json::object()), 400, "invalid_argument");
  expect_error(post(svc, "/sessions/" + sid + "/iterations", {{"prompt", "x"}, {"n", 2}}), 400,
               "invalid_argument");
  expect_error(post(svc, "/sessions/" + sid + "/iterations", {{"prompt", "x"}, {"branches", {"sketch"}}}), 400,
               "invalid_argument");
  expect_error(post(svc, "/sessions/missing/iterations", {{"prompt", "x"}}), 404, "session_not_found");
  expect_error(get(svc, "/sessions/" + sid + "/iterations/1"), 404, "iteration_not_found");
  expect_error(get(svc, "/sessions/" + sid + "/recommendations"), 409, "no_scored_candidates");
  expect_error(get(svc, "/candidates/" + sid + "-1-g00"), 404, "candidate_not_found");

  auto bad = svc.client().Post("/sessions", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
}

TEST_CASE("iteration lifecycle over HTTP") {
  TempDir dir("gw-iter");
  json payloads;  // GET bodies captured for the restart comparison
  std::string sid;
  std::string cid;
  {
    Service svc(dir.path);
    sid = post(svc, "/sessions", {{"seed", 9}, {"config", kSmall}}).body["id"];

    const auto accepted = post(svc, "/sessions/" + sid + "/iterations", {{"prompt", "a pink cat Pokemon with blue eyes"}});
    CHECK(accepted.status == 202);
    conforms("iteration_accepted.json", accepted.body);
    CHECK(accepted.location == "/sessions/" + sid + "/iterations/1");

    const auto early = get(svc, accepted.location);
    CHECK(early.status == 200);
    conforms("iteration.json", early.body);
    const std::set<std::string> in_progress{"pending", "generating", "scoring"};
    CHECK(in_progress.count(early.body["status"].get<std::string>()) == 1);
    expect_error(get(svc, accepted.location + "/treemap"), 409, "not_ready");

    svc.api.drain();
    const auto done = get(svc, accepted.location);
    conforms("iteration.json", done.body);
    CHECK(done.body["status"] == "ready");
    CHECK(done.body["candidates"].size() == 8);
    CHECK(done.body["clusters"].size() == 8);
    cid = done.body["candidates"][0]["id"];

    const auto treemap = get(svc, accepted.location + "/treemap");
    CHECK(treemap.status == 200);
    conforms("treemap.json", treemap.body);

    const auto report = get(svc, accepted.location + "/report");
    CHECK(report.status == 200);
    conforms("report.json", report.body);

    const auto candidate = get(svc, "/candidates/" + cid);
    CHECK(candidate.status == 200);
    conforms("candidate.json", candidate.body);
    CHECK(candidate.body["judge_pairs"].size() == 32);

    std::size_t previous = 100;
    for (const double t : {0.0, 0.3, 0.5, 0.7, 1.0}) {
      const auto c = get(svc, "/candidates/" + cid + "/contribution?keyword=cat&threshold=" + std::to_string(t));
      CHECK(c.status == 200);
      conforms("contribution.json", c.body);
      CHECK(c.body["links"].size() <= previous);
      previous = c.body["links"].size();
    }
    expect_error(get(svc, "/candidates/" + cid + "/contribution"), 400, "invalid_argument");
    expect_error(get(svc, "/candidates/" + cid + "/contribution?keyword=cat&threshold=high"), 400,
                 "invalid_argument");

    const std::string url = candidate.body["views"][0];
    const auto blob = get(svc, url);
    CHECK(blob.status == 200);
    CHECK(blob.raw.substr(1, 3) == "PNG");

    const auto recs = get(svc, "/sessions/" + sid + "/recommendations?focus=clip_score,plausibility_3d");
    CHECK(recs.status == 200);
    conforms("recommendations.json", recs.body);
    CHECK(recs.body["focus"] == json{"clip_score", "plausibility_3d"});
    expect_error(get(svc, "/sessions/" + sid + "/recommendations?focus=aesthetics"), 400, "unknown_metric");

    expect_error(get(svc, "/sessions/" + sid + "/iterations/7"), 404, "iteration_not_found");
    expect_error(get(svc, "/sessions/" + sid + "/iterations/x/report"), 404, "iteration_not_found");

    payloads["session"] = get(svc, "/sessions/" + sid).raw;
    payloads["iteration"] = done.raw;
    payloads["treemap"] = treemap.raw;
    payloads["report"] = report.raw;
    payloads["candidate"] = candidate.raw;
    payloads["recs"] = recs.raw;
  }
  // A fresh process over the same store answers GETs identically.
  Service again(dir.path, 12345);
  CHECK(get(again, "/sessions/" + sid).raw == payloads["session"]);
  CHECK(get(again, "/sessions/" + sid + "/iterations/1").raw == payloads["iteration"]);
  CHECK(get(again, "/sessions/" + sid + "/iterations/1/treemap").raw == payloads["treemap"]);
  CHECK(get(again, "/sessions/" + sid + "/iterations/1/report").raw == payloads["report"]);
  CHECK(get(again, "/candidates/" + cid).raw == payloads["candidate"]);
  CHECK(get(again, "/sessions/" + sid + "/recommendations?focus=clip_score,plausibility_3d").raw ==
        payloads["recs"]);

  const auto kw = post(again, "/sessions/" + sid + "/prompt/keywords", {{"keywords", {"Japanese"}}});
  CHECK(kw.status == 200);
  conforms("keywords.json", kw.body);
  CHECK(kw.body["prompt"] == "a pink cat Pokemon with blue eyes, Japanese");
  const auto dup = post(again, "/sessions/" + sid + "/prompt/keywords", {{"keywords", {"japanese"}}});
  CHECK(dup.body["appended"].empty());
  CHECK(dup.body["warnings"].size() == 1);
  expect_error(post(again, "/sessions/" + sid + "/prompt/keywords", json::object()), 400, "invalid_argument");
  const auto s = get(again, "/sessions/" + sid);
  conforms("session.json", s.body);
  CHECK(s.body["lineage"].size() == 2);
  CHECK(s.body["lineage"][1]["source"] == "keyword-merge");
}

TEST_CASE("iterations serialize per session and run across sessions") {
  TempDir dir("gw-conc");
  Service svc(dir.path);
  const std::string a = post(svc, "/sessions", {{"seed", 1}, {"config", kSmall}}).body["id"];
  const std::string b = post(svc, "/sessions", {{"seed", 2}, {"config", kSmall}}).body["id"];
  CHECK(post(svc, "/sessions/" + a + "/iterations", {{"prompt", "a red chair"}}).body["index"] == 1);
  CHECK(post(svc, "/sessions/" + a + "/iterations", {{"prompt", "a red chair"}, {"branches", {"retrieval"}}})
            .body["index"] == 2);
  CHECK(post(svc, "/sessions/" + b + "/iterations", {{"prompt", "a blue lamp"}}).body["index"] == 1);
  svc.api.drain();
  for (const auto& [sid, k] : std::vector<std::pair<std::string, int>>{{a, 1}, {a, 2}, {b, 1}}) {
    const auto it = get(svc, "/sessions/" + sid + "/iterations/" + std::to_string(k));
    CHECK(it.body["status"] == "ready");
  }
  const auto only_retrieval = get(svc, "/sessions/" + a + "/iterations/2");
  CHECK(only_retrieval.body["options"]["generation"] == false);
  for (const auto& c : only_retrieval.body["candidates"]) CHECK(c["branch"] == "retrieval");
}
