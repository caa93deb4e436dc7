// forge3d command line: serve, score-batch, mock-demo, replay.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "forge3d/common/error.hpp"
#include "forge3d/gateway/server.hpp"
#include "forge3d/imaging/codec.hpp"
#include "forge3d/judge/judge.hpp"
#include "forge3d/orchestrator/engine.hpp"

#ifndef FORGE3D_ASSETS_DIR
#define FORGE3D_ASSETS_DIR "assets"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace forge3d;

namespace {

struct Globals {
  std::string config;
  std::string store = "forge3d-store";
  std::uint64_t seed = 0;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string assets = FORGE3D_ASSETS_DIR;
};

orchestrator::EngineConfig load_config(const Globals& g) {
  if (g.config.empty()) return {};
  return orchestrator::load_engine_config(g.config);
}

void force_mock(providers::ProvidersConfig& p) {
  for (auto* c : {&p.embedding, &p.segmentation, &p.generation, &p.retrieval, &p.judge, &p.llm, &p.attention}) {
    c->kind = providers::ProviderKind::mock;
  }
}

int cmd_serve(const Globals& g) {
  orchestrator::Engine engine(g.store, load_config(g), g.assets, g.seed);
  const bool ok = gateway::serve(engine, g.host, g.port, [&](httplib::Server&) {
    std::cout << "listening on http://" << g.host << ":" << g.port << std::endl;
  });
  if (!ok) {
    std::cerr << "cannot bind " << g.host << ":" << g.port << "\n";
    return 1;
  }
  return 0;
}

int cmd_score_batch(const Globals& g, const fs::path& in, const fs::path& out) {
  auto config = load_config(g);
  std::ifstream sidecar(in / "prompts.json");
  if (!sidecar) {
    std::cerr << "missing " << (in / "prompts.json") << "\n";
    return 2;
  }
  const auto prompts = json::parse(sidecar);
  fs::create_directories(out);

  auto prov = providers::make_providers(config.providers, g.seed);
  judge::VerdictCache cache;
  const auto& tmpl = judge::default_template();
  orchestrator::ScoringContext ctx{&prov, &config, &cache, &tmpl};

  int failed = 0;
  for (const auto& [name, prompt] : prompts.items()) {
    try {
      scoring::MultiViewSet set;
      set.candidate_id = name;
      for (int v = 0; v < scoring::kViewCount; ++v) {
        set.views.push_back(imaging::read_image(in / name / ("view_" + std::to_string(v) + ".png")));
      }
      set.validate();
      orchestrator::CandidateRecord c;
      c.id = name;
      c.prompt = prompt.get<std::string>();
      orchestrator::score_candidate(c, set, ctx);
      std::ofstream(out / (name + ".json")) << orchestrator::candidate_report(c, tmpl.version()).dump(2) << "\n";
      std::cout << name << ": ok\n";
    } catch (const std::exception& e) {
      ++failed;
      std::cout << name << ": failed: " << e.what() << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

int cmd_mock_demo(const Globals& g, const std::string& prompt, std::size_t n) {
  auto config = load_config(g);
  force_mock(config.providers);
  config.n = n;
  orchestrator::Engine engine(g.store, config, g.assets, g.seed);
  const auto s = engine.create_session(g.seed, config);
  orchestrator::IterationOptions opts;
  opts.n = n;
  const auto it = engine.run_iteration(s.id, prompt, opts);

  std::cout << "session " << s.id << " seed " << s.seed << "\n";
  std::cout << "iteration " << it.index << " " << orchestrator::status_name(it.status) << " candidates "
            << it.candidates.size() << "\n";
  for (const auto& c : it.candidates) {
    std::cout << c.id << " " << providers::branch_name(c.branch) << (c.grayed ? " grayed" : "")
              << " gate=" << (c.gate ? fmt(c.gate->total) : "-");
    for (const auto d : scoring::kAllDimensions) {
      std::cout << " " << scoring::dimension_name(d) << "=" << fmt(c.scores[d].value);
    }
    std::cout << "\n";
  }
  for (const auto& k : it.keywords) {
    std::cout << "keyword " << k.keyword << " x" << k.frequency << " cluster "
              << (k.cluster == promptlab::kMiscCluster ? std::string("misc") : std::to_string(k.cluster)) << "\n";
  }
  for (const auto& w : it.warnings) std::cout << "warning " << w << "\n";
  return it.status == orchestrator::Status::ready ? 0 : 1;
}

int cmd_replay(const Globals& g, const std::string& id) {
  orchestrator::Store store(g.store);
  const auto original = store.load(id);
  const auto scratch = fs::path(g.store) / "scratch" / ("replay-" + id);
  fs::remove_all(scratch);
  const auto result = orchestrator::replay(original, g.assets, scratch);
  fs::remove_all(scratch);
  std::error_code ec;
  fs::remove(fs::path(g.store) / "scratch", ec);  // only if empty
  if (result.identical) {
    std::cout << "identical\n";
    return 0;
  }
  std::cout << "different\n";
  for (const auto& d : result.differences) std::cout << "  " << d << "\n";
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge3d"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "engine config JSON");
  app.add_option("--store", g.store, "session store directory");
  app.add_option("--seed", g.seed, "session seed");
  app.add_option("--port", g.port, "HTTP port");
  app.add_option("--host", g.host, "HTTP bind address");
  app.add_option("--assets", g.assets, "modifier corpus and stopwords directory");

  auto* serve = app.add_subcommand("serve", "run the HTTP gateway");

  std::string in, out;
  auto* batch = app.add_subcommand("score-batch", "score directories of nine views");
  batch->add_option("--in", in, "input directory with prompts.json")->required();
  batch->add_option("--out", out, "report directory")->required();

  std::string prompt = "a pink cat Pokemon with blue eyes";
  std::size_t n = 16;
  auto* demo = app.add_subcommand("mock-demo", "one seeded iteration with mock providers");
  demo->add_option("--prompt", prompt);
  demo->add_option("--n", n)->check(CLI::Range(4, 64));

  std::string session;
  auto* rep = app.add_subcommand("replay", "re-execute a stored session and compare");
  rep->add_option("--session", session)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(g);
    if (*batch) return cmd_score_batch(g, in, out);
    if (*demo) return cmd_mock_demo(g, prompt, n);
    if (*rep) return cmd_replay(g, session);
  } catch (const Error& e) {
    std::cerr << code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
