#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "../support/fixtures.hpp"
#include "forge3d/common/error.hpp"
#include "forge3d/providers/http.hpp"
#include "forge3d/providers/mock.hpp"
#include "forge3d/providers/registry.hpp"
#include "forge3d/scoring/clip.hpp"

using namespace forge3d;
using namespace forge3d::providers;
using nlohmann::json;

namespace {

/// Local stand-in for remote model endpoints.
struct FakeServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;
  std::atomic<int> hits{0};

  FakeServer() {
    port = server.bind_to_any_port("127.0.0.1");
    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      ++hits;
      return httplib::Server::HandlerResponse::Unhandled;
    });
  }
  void start() {
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

ProviderConfig http_config(const std::string& url, int retries = 0) {
  ProviderConfig c;
  c.kind = ProviderKind::http;
  c.endpoint = url;
  c.retries = retries;
  c.backoff_ms = 0;
  c.timeout_ms = 2000;
  return c;
}

} // namespace

TEST_CASE("mock providers are deterministic") {
  MockEmbedding a(7), b(7), c(8);
  CHECK(a.embed_text("a red chair") == b.embed_text("a red chair"));
  CHECK(a.embed_text("a red chair") != c.embed_text("a red chair"));
  const auto e = a.embed_text("a red chair");
  double norm = 0.0;
  for (double x : e) norm += x * x;
  CHECK(norm == doctest::Approx(1.0));
  // shared words bring prompts closer
  CHECK(scoring::cosine(e, a.embed_text("a red sofa")) > scoring::cosine(e, a.embed_text("blue glass lamp")));

  MockGeneration g1(3, 64), g2(3, 64);
  const auto r1 = g1.generate("a red chair", "x-1");
  const auto r2 = g2.generate("a red chair", "x-1");
  REQUIRE(r1.views.views.size() == 9);
  CHECK(r1.views.views == r2.views.views);
  CHECK(r1.views.views[0].width() == 64);

  MockRetrieval ret(3, 64);
  const auto hits = ret.retrieve("a chair", 5);
  CHECK(hits.size() == 5);
  CHECK(hits[0].branch == Branch::retrieval);
  CHECK(ret.retrieve("a chair", 100).size() == retrieval_fixtures().size());

  MockJudge j1(1), j2(1);
  JudgeCall call;
  call.metric = "plausibility_3d";
  const auto img = forge3d::testing::square_on_background(32, 4, 4, 10, {9, 9, 200});
  call.images = {&img, &img};
  CHECK(j1.evaluate(call) == j2.evaluate(call));
}

TEST_CASE("mock judge scenarios") {
  forge3d::testing::TempDir dir("scenario");
  std::ofstream(dir.path / "fail.json") << R"({"mode": "fail"})";
  std::ofstream(dir.path / "script.json")
      << R"({"responses": {"plausibility_3d": ["{\"score\": 2}", "{\"score\": 9}"]}, "default_response": "{\"score\": 5}"})";
  const auto img = forge3d::testing::square_on_background(32, 4, 4, 10, {9, 9, 200});
  JudgeCall call;
  call.images = {&img, &img};
  call.view_indices = {1, 2};
  call.metric = "plausibility_3d";

  MockJudge fail(1, MockJudge::load_scenario(dir.path / "fail.json"));
  CHECK_THROWS_AS(fail.evaluate(call), ProviderError);

  MockJudge script(1, MockJudge::load_scenario(dir.path / "script.json"));
  CHECK(script.evaluate(call) == "{\"score\": 9}");
  call.metric = "texture_geometry";
  CHECK(script.evaluate(call) == "{\"score\": 5}");
  CHECK_THROWS_AS(MockJudge::load_scenario(dir.path / "none.json"), Error);
}

TEST_CASE("provider config parsing") {
  const auto c = providers_config_from_json(
      json{{"judge", {{"kind", "http"}, {"endpoint", "http://127.0.0.1:9/j"}, {"retries", 4}}}});
  CHECK(c.judge.kind == ProviderKind::http);
  CHECK(c.judge.retries == 4);
  CHECK(c.embedding.kind == ProviderKind::mock);
  CHECK(providers_config_from_json(to_json(c)) == c);
  try {
    providers_config_from_json(json{{"judge", {{"retires", 4}}}});
    FAIL("typo accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
  }
  CHECK_THROWS_AS(parse_url("https://x/y"), Error);
  const auto u = parse_url("http://localhost:8081/v1/embed");
  CHECK(u.scheme_host_port == "http://localhost:8081");
  CHECK(u.path == "/v1/embed");
}

TEST_CASE("http adapters speak the wire format") {
  FakeServer fake;
  std::string seen_auth;
  json seen_judge;
  fake.server.Post("/embed/text", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    res.set_content(json::array({body.at("text").get<std::string>().size(), 1.0}).dump(), "application/json");
  });
  fake.server.Post("/seg", [](const httplib::Request& req, httplib::Response& res) {
    const auto img = decode_image_b64(json::parse(req.body).at("image").get<std::string>());
    imaging::RasterImage mask(img.width(), img.height(), imaging::Rgb{0, 0, 0});
    mask.set(1, 1, {255, 255, 255});
    res.set_content(json{{"mask", encode_image_b64(mask)}}.dump(), "application/json");
  });
  fake.server.Post("/judge", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_judge = json::parse(req.body);
    res.set_content("{\"score\": 6}", "text/plain");
  });
  fake.server.Post("/llm", [](const httplib::Request& req, httplib::Response& res) {
    const auto b = json::parse(req.body);
    res.set_content(json{{"prompts", {b.at("prompt").get<std::string>() + ", x"}}}.dump(), "application/json");
  });
  fake.server.Get("/judge/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  fake.start();

  HttpEmbedding emb(http_config(fake.url("/embed")));
  CHECK(emb.embed_text("abcd") == Embedding{4.0, 1.0});

  const auto img = forge3d::testing::square_on_background(16, 2, 2, 4, {1, 2, 3});
  HttpSegmentation seg(http_config(fake.url("/seg")));
  const auto m = seg.segment(img);
  CHECK(m.count() == 1);
  CHECK(m.at(1, 1));

  ::setenv("FORGE3D_TEST_TOKEN", "sekrit", 1);
  auto jc = http_config(fake.url("/judge"));
  jc.token_env = "FORGE3D_TEST_TOKEN";
  HttpJudge judge(jc);
  JudgeCall call;
  call.metric = "texture_geometry";
  call.template_text = "T";
  call.images = {&img, &img};
  CHECK(judge.evaluate(call) == "{\"score\": 6}");
  CHECK(seen_auth == "Bearer sekrit");
  CHECK(seen_judge.at("metric") == "texture_geometry");
  CHECK(seen_judge.at("images").size() == 2);
  CHECK(decode_image_b64(seen_judge.at("images")[0].get<std::string>()) == img);

  HttpLlm llm(http_config(fake.url("/llm")));
  const std::vector<std::string> mods{"a"};
  CHECK(llm.augment("p", 1, mods, 3) == std::vector<std::string>{"p, x"});

  CHECK(HttpTransport("judge", jc).healthy());
  CHECK_FALSE(HttpTransport("llm", http_config(fake.url("/llm"))).healthy());
}

TEST_CASE("http errors become provider errors") {
  FakeServer fake;
  fake.server.Post("/bad", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  fake.server.Post("/junk/text", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("[\"x\"]", "application/json");
  });
  fake.start();
  HttpJudge bad(http_config(fake.url("/bad")));
  JudgeCall call;
  const auto img = imaging::RasterImage(16, 16);
  call.images = {&img, &img};
  CHECK_THROWS_AS(bad.evaluate(call), ProviderError);
  HttpEmbedding junk(http_config(fake.url("/junk")));
  CHECK_THROWS_AS(junk.embed_text("x"), ProviderError);
}

TEST_CASE("guards retry and then trip the breaker") {
  FakeServer fake;
  fake.server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    if (fake.hits % 3 != 0) {
      res.status = 503;
      return;
    }
    res.set_content("{\"score\": 4}", "text/plain");
  });
  fake.server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  fake.start();

  ProvidersConfig pc;
  pc.judge = http_config(fake.url("/flaky"), 2);
  auto set = make_providers(pc, 1);
  const auto img = imaging::RasterImage(16, 16);
  JudgeCall call;
  call.images = {&img, &img};
  CHECK(set.judge->evaluate(call) == "{\"score\": 4}");
  CHECK(fake.hits == 3);

  pc.judge = http_config(fake.url("/down"), 1);
  auto down = make_providers(pc, 1);
  fake.hits = 0;
  for (int i = 0; i < CallGuard::kTripAfter; ++i) CHECK_THROWS_AS(down.judge->evaluate(call), ProviderError);
  CHECK(fake.hits == CallGuard::kTripAfter * 2);
  // open breaker: fails without touching the endpoint
  CHECK_THROWS_AS(down.judge->evaluate(call), ProviderError);
  CHECK(fake.hits == CallGuard::kTripAfter * 2);
}

TEST_CASE("guard limits concurrency") {
  struct Slow final : EmbeddingProvider {
    std::atomic<int> now{0}, peak{0};
    Embedding embed_text(std::string_view) override {
      const int n = ++now;
      int p = peak;
      while (n > p && !peak.compare_exchange_weak(p, n)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      --now;
      return {1.0};
    }
    Embedding embed_image(const imaging::RasterImage&) override { return {1.0}; }
  };
  auto slow = std::make_shared<Slow>();
  ProviderSet raw = make_providers({}, 1);
  raw.embedding = slow;
  ProvidersConfig pc;
  pc.embedding.in_flight = 2;
  auto guarded = guard_providers(raw, pc);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { guarded.embedding->embed_text("x"); });
  threads.clear();
  CHECK(slow->peak <= 2);
  CHECK(slow->peak >= 1);
}

TEST_CASE("health reporting") {
  ProvidersConfig mock;
  const auto ok = health(mock);
  CHECK(ok.overall == HealthStatus::ok);
  CHECK(ok.providers.size() == 7);

  ProvidersConfig partial;
  partial.judge = http_config("http://127.0.0.1:1/judge");
  partial.judge.timeout_ms = 200;
  const auto some = health(partial);
  CHECK(some.overall == HealthStatus::degraded);
  CHECK(some.providers.at("judge").status == HealthStatus::down);
  CHECK(some.providers.at("embedding").status == HealthStatus::ok);
  CHECK(health_name(HealthStatus::degraded) == "degraded");
}
