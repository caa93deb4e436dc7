#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "../support/fixtures.hpp"
#include "../support/stubs.hpp"
#include "forge3d/common/error.hpp"
#include "forge3d/judge/judge.hpp"

using namespace forge3d;
using namespace forge3d::judge;
using forge3d::testing::ScriptedJudge;

namespace {

struct Views {
  scoring::MultiViewSet set;
  std::vector<std::string> hashes;
  Views() {
    set.candidate_id = "c";
    for (int v = 0; v < scoring::kViewCount; ++v) {
      set.views.push_back(forge3d::testing::square_on_background(32, v, 8, 12, {200, 40, 40}));
      hashes.push_back(set.views.back().content_hash());
    }
  }
};

} // namespace

TEST_CASE("pairs are consecutive views") {
  const auto p = view_pairs();
  REQUIRE(p.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(p[static_cast<std::size_t>(i)][0] == i);
    CHECK(p[static_cast<std::size_t>(i)][1] == i + 1);
  }
}

TEST_CASE("strict json verdicts") {
  const auto v = parse_verdict(R"({"score": 7, "rationale": "ok", "regions": [{"x":0.1,"y":0.2,"w":0.3,"h":0.4}]})",
                               Metric::plausibility_3d);
  CHECK(v.raw == 7);
  CHECK(v.normalized == doctest::Approx(0.7));
  CHECK(v.rationale == "ok");
  REQUIRE(v.regions.size() == 1);
  CHECK(v.regions[0].w == doctest::Approx(0.3));
  CHECK_FALSE(v.fallback_parse);
  CHECK(parse_verdict("Sure! {\"score\": 10}", Metric::texture_geometry).raw == 10);
}

TEST_CASE("lenient fallback parse") {
  const auto v = parse_verdict("Score: 8/10. The views agree.", Metric::low_level_texture);
  CHECK(v.raw == 8);
  CHECK(v.fallback_parse);
  CHECK(v.rationale == "The views agree.");
}

TEST_CASE("malformed verdicts") {
  for (const char* text : {"no digits here", "score 11", "{\"score\": 0}", "{\"score\": 7.5}", "123"}) {
    try {
      parse_verdict(text, Metric::plausibility_3d);
      FAIL("accepted " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::malformed);
    }
  }
}

TEST_CASE("verdict json round trip") {
  auto v = parse_verdict(R"({"score": 4, "rationale": "r", "regions": [{"x":0,"y":0,"w":0.5,"h":0.5}]})",
                         Metric::text_image_alignment);
  const auto back = verdict_from_json(verdict_to_json(v));
  CHECK(back.raw == 4);
  CHECK(back.rationale == "r");
  CHECK(back.regions == v.regions);
}

TEST_CASE("metric names") {
  for (const auto m : kAllMetrics) CHECK(parse_metric(metric_name(m)) == m);
  try {
    parse_metric("sharpness");
    FAIL("accepted unknown metric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_metric);
  }
}

TEST_CASE("template version follows the text") {
  const auto& base = default_template();
  auto edited = base;
  edited.rubric_steps.push_back("Be brief.");
  CHECK(base.version() == default_template().version());
  CHECK(base.version() != edited.version());
  const auto text = base.render(Metric::plausibility_3d, "a red chair");
  CHECK(text.find("a red chair") != std::string::npos);
}

TEST_CASE("cache key and wire body") {
  Views v;
  const auto req = build_request(Metric::plausibility_3d, {2, 3}, v.set, v.hashes, "p", default_template());
  CHECK(req.cache_key == default_template().version() + "/plausibility_3d/" + v.hashes[2] + "_" + v.hashes[3]);
  const auto wire = nlohmann::json::parse(to_wire_json(req.call));
  CHECK(wire.at("metric") == "plausibility_3d");
  CHECK(wire.at("images").size() == 2);
  CHECK(wire.at("template_text").get<std::string>() == req.call.template_text);
}

TEST_CASE("32 calls per candidate and mean aggregation") {
  Views v;
  ScriptedJudge j([](const providers::JudgeCall& c, int) {
    // score = second view index + 1
    return "{\"score\": " + std::to_string(c.view_indices[1] + 1) + "}";
  });
  const auto out = judge_candidate(v.set, v.hashes, "p", j, default_template());
  CHECK(j.calls == 32);
  CHECK(out.pairs.size() == 32);
  // mean of (2..9)/10
  CHECK(*out.scores.plausibility_3d == doctest::Approx(0.55));
  CHECK(*out.per_view(Metric::plausibility_3d, 0) == doctest::Approx(0.2));
  CHECK(*out.per_view(Metric::plausibility_3d, 4) == doctest::Approx((0.5 + 0.6) / 2));

  JudgeOptions med;
  med.aggregation = Aggregation::median;
  const auto m = judge_candidate(v.set, v.hashes, "p", j, default_template(), nullptr, med);
  CHECK(*m.scores.texture_geometry == doctest::Approx(0.55));
}

TEST_CASE("retries after malformed output, then missing") {
  Views v;
  ScriptedJudge flaky([](const providers::JudgeCall& c, int) -> std::string {
    static thread_local int n = 0;
    (void)c;
    return (n++ % 2 == 0) ? "cannot tell" : "{\"score\": 6}";
  });
  const auto out = judge_candidate(v.set, v.hashes, "p", flaky, default_template());
  for (const auto& p : out.pairs) CHECK(p.verdict.has_value());

  ScriptedJudge broken([](const providers::JudgeCall&, int) { return std::string("no idea"); });
  JudgeOptions o;
  o.max_retries = 2;
  const auto miss = judge_candidate(v.set, v.hashes, "p", broken, default_template(), nullptr, o);
  CHECK(broken.calls == 32 * 3);
  CHECK_FALSE(miss.scores.plausibility_3d.has_value());
  CHECK_FALSE(miss.scores.text_image_alignment.has_value());
  for (const auto& p : miss.pairs) {
    CHECK(p.attempts == 3);
    CHECK_FALSE(p.error.empty());
  }
}

TEST_CASE("provider failure leaves dimensions missing, never zero") {
  Views v;
  ScriptedJudge down([](const providers::JudgeCall&, int) -> std::string {
    throw providers::ProviderError("judge", "offline");
  });
  const auto out = judge_candidate(v.set, v.hashes, "p", down, default_template());
  for (const auto m : kAllMetrics) CHECK_FALSE(out.score(m).has_value());
}

TEST_CASE("verdict cache avoids repeat calls and mirrors to disk") {
  forge3d::testing::TempDir dir("judge-cache");
  Views v;
  ScriptedJudge j([](const providers::JudgeCall&, int) { return std::string("{\"score\": 5}"); });
  {
    VerdictCache cache(dir.path);
    judge_candidate(v.set, v.hashes, "p", j, default_template(), &cache);
    CHECK(j.calls == 32);
    const auto again = judge_candidate(v.set, v.hashes, "p", j, default_template(), &cache);
    CHECK(j.calls == 32);
    CHECK(cache.hits() == 32);
    for (const auto& p : again.pairs) CHECK(p.cached);
  }
  VerdictCache reopened(dir.path);
  judge_candidate(v.set, v.hashes, "p", j, default_template(), &reopened);
  CHECK(j.calls == 32);
  CHECK(std::filesystem::exists(dir.path / default_template().version() / "plausibility_3d"));
}

TEST_CASE("regions land on the second view of the pair") {
  Views v;
  ScriptedJudge j([](const providers::JudgeCall& c, int) -> std::string {
    if (c.view_indices[0] == 2 && c.metric == "plausibility_3d") {
      return R"({"score": 3, "regions": [{"x":0.5,"y":0.5,"w":0.2,"h":0.2}]})";
    }
    return "{\"score\": 8}";
  });
  const auto out = judge_candidate(v.set, v.hashes, "p", j, default_template());
  const auto regions = out.regions_per_view();
  CHECK(regions[3].size() == 1);
  CHECK(regions[2].empty());
}
