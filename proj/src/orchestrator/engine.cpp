#include <algorithm>
#include <thread>

#include "forge3d/common/error.hpp"
#include "forge3d/common/hash.hpp"
#include "forge3d/common/parallel.hpp"
#include "forge3d/common/text.hpp"
#include "forge3d/imaging/saliency.hpp"
#include "forge3d/orchestrator/engine.hpp"

namespace forge3d::orchestrator {
namespace {

std::string pad2(std::size_t k) { return (k < 10 ? "0" : "") + std::to_string(k); }

void advance(Iteration& it, Status next) {
  if (static_cast<int>(next) <= static_cast<int>(it.status) && it.status != Status::pending) {
    throw Error(ErrorCode::invalid_argument,
                "status cannot move from " + std::string(status_name(it.status)) + " to " +
                    std::string(status_name(next)),
                "orchestrator");
  }
  it.status = next;
}

struct Produced {
  CandidateRecord record;
  scoring::MultiViewSet set;
};

Produced adopt(providers::GenerationResult r, std::string id, providers::Branch branch,
               const std::string& prompt_id) {
  Produced p;
  p.record.id = id;
  p.record.branch = branch;
  p.record.source_ref = branch == providers::Branch::retrieval ? r.candidate_id : std::string();
  p.record.prompt_id = prompt_id;
  p.record.prompt = r.prompt;
  p.record.tokens = tokenize(r.prompt);
  p.record.mesh_ref = r.mesh_ref;
  p.set = std::move(r.views);
  p.set.candidate_id = std::move(id);
  return p;
}

imaging::BinaryMask foreground(const imaging::RasterImage& view, providers::SegmentationProvider& seg) {
  imaging::BinaryMask mask(view.width(), view.height());
  try {
    mask = seg.segment(view);
  } catch (const providers::ProviderError&) {
  }
  if (!mask.empty()) return mask;
  try {
    return imaging::saliency_mask(view).mask;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_foreground) throw;
  }
  return imaging::BinaryMask(view.width(), view.height());
}

} // namespace

Engine::Engine(std::filesystem::path store_root, EngineConfig defaults, std::filesystem::path assets_dir,
               std::uint64_t default_seed)
    : store_(std::move(store_root)), defaults_(std::move(defaults)),
      assets_(promptlab::load_assets(assets_dir)), default_seed_(default_seed),
      cache_(store_.judge_cache_dir()) {
  defaults_.validate();
}

std::mutex& Engine::session_mutex(const std::string& id) {
  std::lock_guard lock(registry_mutex_);
  auto& m = session_mutexes_[id];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

std::shared_ptr<providers::ProviderSet> Engine::providers_for(const Session& s) {
  std::lock_guard lock(registry_mutex_);
  auto& set = provider_sets_[s.id];
  if (!set) set = std::make_shared<providers::ProviderSet>(providers::make_providers(s.config.providers, s.seed));
  return set;
}

Session Engine::create_session(std::optional<std::uint64_t> seed, std::optional<EngineConfig> config,
                               std::optional<std::string> id) {
  Session s;
  s.seed = seed.value_or(default_seed_);
  s.config = config.value_or(defaults_);
  s.config.validate();
  s.provider_config_hash = sha256_hex(std::string_view(providers::to_json(s.config.providers).dump()));
  s.corpus_hash = assets_.modifiers.hash;
  s.stopwords_hash = assets_.stopwords.hash;
  s.template_version = judge::default_template().version();

  std::lock_guard lock(registry_mutex_);
  if (id) {
    if (store_.exists(*id)) throw Error(ErrorCode::invalid_argument, "session " + *id + " exists", "orchestrator");
    s.id = *id;
  } else {
    const auto existing = static_cast<std::uint64_t>(store_.list().size());
    for (std::uint64_t k = 0;; ++k) {
      s.id = "s" + hex64(hash_combine(hash_combine(s.seed, existing), k)).substr(0, 12);
      if (!store_.exists(s.id)) break;
    }
  }
  store_.save(s);
  return s;
}

int Engine::begin_iteration(const std::string& session_id, const std::string& prompt,
                            IterationOptions options) {
  std::lock_guard lock(session_mutex(session_id));
  auto s = store_.load(session_id);
  const auto text = trim(prompt);
  if (text.empty()) throw Error(ErrorCode::invalid_argument, "prompt is empty", "orchestrator");
  if (options.n < 4 || options.n > 64) {
    throw Error(ErrorCode::invalid_argument, "n must lie in [4, 64]", "orchestrator");
  }
  if (!options.generation && !options.retrieval) {
    throw Error(ErrorCode::invalid_argument, "at least one branch must be enabled", "orchestrator");
  }
  Iteration it;
  it.index = static_cast<int>(s.iterations.size()) + 1;
  it.prompt = text;
  it.options = options;
  if (!(s.current_prompt_id && s.current_prompt == text)) {
    auto record = promptlab::PromptRecord::make(s.id + "-p" + std::to_string(s.lineage.size() + 1), text,
                                                s.current_prompt_id, promptlab::PromptSource::user);
    s.current_prompt = text;
    s.current_prompt_id = record.id;
    s.lineage.push_back(std::move(record));
  }
  it.prompt_id = *s.current_prompt_id;
  s.commands.push_back({"iteration", text, options, {}});
  s.iterations.push_back(std::move(it));
  store_.save(s);
  return static_cast<int>(s.iterations.size());
}

Iteration Engine::execute_iteration(const std::string& session_id, int index) {
  std::lock_guard lock(session_mutex(session_id));
  auto s = store_.load(session_id);
  if (index < 1 || static_cast<std::size_t>(index) > s.iterations.size()) {
    throw Error(ErrorCode::iteration_not_found, "no iteration " + std::to_string(index), "orchestrator");
  }
  const auto pos = static_cast<std::size_t>(index - 1);
  if (s.iterations[pos].status != Status::pending) return s.iterations[pos];
  run_pipeline(s, pos, [&] { store_.save(s); });
  return s.iterations[pos];
}

Iteration Engine::run_iteration(const std::string& session_id, const std::string& prompt,
                                IterationOptions options) {
  return execute_iteration(session_id, begin_iteration(session_id, prompt, options));
}

void Engine::run_pipeline(Session& s, std::size_t pos, const std::function<void()>& persist) {
  auto& it = s.iterations[pos];
  const auto& cfg = s.config;
  const std::size_t workers = cfg.workers ? cfg.workers : default_workers();
  try {
    auto prov = providers_for(s);
    advance(it, Status::generating);
    persist();

    const auto t0 = *std::find_if(s.lineage.begin(), s.lineage.end(),
                                  [&](const promptlab::PromptRecord& p) { return p.id == it.prompt_id; });
    promptlab::AugmentOptions aopts;
    aopts.n = it.options.n;
    aopts.seed = hash_combine(s.seed, static_cast<std::uint64_t>(it.index));
    auto aug = promptlab::augment(t0, *prov->llm, assets_.modifiers.entries, aopts);
    it.augmented = std::move(aug.prompts);
    it.warnings.insert(it.warnings.end(), aug.warnings.begin(), aug.warnings.end());

    const std::string prefix = s.id + "-" + std::to_string(it.index) + "-";
    std::vector<std::optional<Produced>> generated(it.augmented.size());
    std::vector<std::string> gen_errors(it.augmented.size());
    std::vector<Produced> retrieved;
    std::string retrieval_error;
    std::exception_ptr gen_failure;

    auto generation_branch = [&] {
      try {
        parallel_for(it.augmented.size(), workers, [&](std::size_t k) {
          const auto& p = it.augmented[k];
          try {
            auto r = prov->generation->generate(p.text, prefix + "g" + pad2(k));
            r.views.validate();
            r.prompt = p.text;
            generated[k] = adopt(std::move(r), prefix + "g" + pad2(k), providers::Branch::generation, p.id);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::provider_error && e.code() != ErrorCode::invalid_argument) throw;
            gen_errors[k] = e.what();
          }
        });
      } catch (...) {
        gen_failure = std::current_exception();
      }
    };
    {
      std::jthread gen_thread;
      if (it.options.generation) gen_thread = std::jthread(generation_branch);
      if (it.options.retrieval && cfg.retrieval_k > 0) {
        try {
          auto results = prov->retrieval->retrieve(t0.text, cfg.retrieval_k);
          for (std::size_t j = 0; j < results.size(); ++j) {
            try {
              results[j].views.validate();
              retrieved.push_back(adopt(std::move(results[j]), prefix + "r" + pad2(j),
                                        providers::Branch::retrieval, t0.id));
            } catch (const Error& e) {
              if (e.code() != ErrorCode::invalid_argument) throw;
              it.diagnostics["retrieval." + pad2(j)] = e.what();
            }
          }
        } catch (const providers::ProviderError& e) {
          retrieval_error = e.what();
        }
      }
    }
    if (gen_failure) std::rethrow_exception(gen_failure);
    for (std::size_t k = 0; k < gen_errors.size(); ++k) {
      if (!gen_errors[k].empty()) it.diagnostics["generation." + pad2(k)] = gen_errors[k];
    }
    if (!retrieval_error.empty()) it.diagnostics["retrieval"] = retrieval_error;

    std::vector<Produced> produced;
    for (auto& g : generated) {
      if (g) produced.push_back(std::move(*g));
    }
    for (auto& r : retrieved) produced.push_back(std::move(r));
    if (produced.empty()) {
      it.diagnostics["pipeline"] = "no candidates from any enabled branch";
      advance(it, Status::failed);
      persist();
      return;
    }

    parallel_for(produced.size(), workers, [&](std::size_t i) {
      auto& p = produced[i];
      for (const auto& v : p.set.views) p.record.view_blobs.push_back(store_.put_blob(v));
    });
    advance(it, Status::scoring);
    persist();

    const auto tmpl = &judge::default_template();
    ScoringContext ctx{prov.get(), &cfg, &cache_, tmpl};
    parallel_for(produced.size(), workers, [&](std::size_t i) {
      score_candidate(produced[i].record, produced[i].set, ctx);
    });

    // Gallery order.
    std::optional<providers::Embedding> prompt_embedding;
    try {
      prompt_embedding = prov->embedding->embed_text(t0.text);
    } catch (const providers::ProviderError& e) {
      it.diagnostics["fusion"] = e.what();
    }
    std::vector<FusionInput> fusion(produced.size());
    parallel_for(produced.size(), workers, [&](std::size_t i) {
      fusion[i].id = produced[i].record.id;
      try {
        fusion[i].front = prov->embedding->embed_image(produced[i].set.views.front());
      } catch (const providers::ProviderError&) {
      }
    });
    const auto fused = fuse_candidates(fusion, prompt_embedding);
    it.fusion_fallback = fused.fallback;
    it.candidates.clear();
    for (const auto i : fused.order) {
      produced[i].record.fusion_similarity = fused.similarity[i];
      it.candidates.push_back(std::move(produced[i].record));
    }

    // Prompt map over the gallery.
    std::vector<std::string> ids;
    std::vector<promptlab::ScoredPrompt> scored;
    for (const auto& c : it.candidates) {
      ids.push_back(c.id);
      scored.push_back({c.id, c.tokens, c.scores});
    }
    try {
      std::vector<providers::Embedding> text_embeddings;
      for (const auto& c : it.candidates) text_embeddings.push_back(prov->embedding->embed_text(c.prompt));
      const auto points = promptlab::project_2d(text_embeddings);
      it.clusters = promptlab::cluster(points, ids, cfg.min_cluster_size);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::provider_error && e.code() != ErrorCode::insufficient_data) throw;
      it.diagnostics["clustering"] = e.what();
      it.clusters = promptlab::cluster(std::vector<imaging::Point2>(ids.size()), ids, ids.size() + 1);
    }
    it.keywords = promptlab::keyword_stats(scored, it.clusters, assets_.stopwords.entries, cfg.top_k);
    it.treemap = layout::to_json(layout::treemap(layout::treemap_inputs(it.keywords, it.clusters),
                                                 cfg.treemap_canvas));
    advance(it, Status::ready);
    persist();
  } catch (const Error& e) {
    it.diagnostics[e.stage().empty() ? "pipeline" : e.stage()] = e.what();
    it.status = Status::failed;
    persist();
  } catch (const std::exception& e) {
    it.diagnostics["pipeline"] = e.what();
    it.status = Status::failed;
    persist();
  }
}

KeywordResult Engine::apply_keyword(const std::string& session_id, std::span<const std::string> keywords) {
  std::lock_guard lock(session_mutex(session_id));
  auto s = store_.load(session_id);
  if (s.current_prompt.empty()) {
    throw Error(ErrorCode::invalid_argument, "session has no prompt yet", "orchestrator");
  }
  auto r = compose_prompt(s.current_prompt, keywords);
  s.commands.push_back({"keywords", "", {}, std::vector<std::string>(keywords.begin(), keywords.end())});
  s.warnings.insert(s.warnings.end(), r.warnings.begin(), r.warnings.end());
  if (!r.appended.empty()) {
    auto record = promptlab::PromptRecord::make(s.id + "-p" + std::to_string(s.lineage.size() + 1), r.prompt,
                                                s.current_prompt_id, promptlab::PromptSource::keyword_merge);
    s.current_prompt = r.prompt;
    s.current_prompt_id = record.id;
    s.lineage.push_back(std::move(record));
  }
  store_.save(s);
  return r;
}

std::vector<promptlab::Recommendation> Engine::recommend(const std::string& session_id,
                                                         std::span<const scoring::Dimension> focus) const {
  const auto s = store_.load(session_id);
  for (auto it = s.iterations.rbegin(); it != s.iterations.rend(); ++it) {
    if (it->status != Status::ready) continue;
    const bool scored = std::any_of(it->candidates.begin(), it->candidates.end(),
                                    [](const CandidateRecord& c) { return c.scores.present_count() > 0; });
    if (scored) return promptlab::recommend(it->keywords, s.current_prompt, focus);
  }
  throw Error(ErrorCode::no_scored_candidates, "session has no scored candidates yet", "orchestrator");
}

Engine::CandidateRef Engine::find_candidate(const std::string& candidate_id) const {
  const auto sid = candidate_id.substr(0, candidate_id.find('-'));
  if (!store_.exists(sid)) throw Error(ErrorCode::candidate_not_found, "no candidate " + candidate_id, "store");
  CandidateRef ref{store_.load(sid), 0, 0};
  for (std::size_t i = 0; i < ref.session.iterations.size(); ++i) {
    const auto& cands = ref.session.iterations[i].candidates;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (cands[c].id == candidate_id) {
        ref.iteration = i;
        ref.candidate = c;
        return ref;
      }
    }
  }
  throw Error(ErrorCode::candidate_not_found, "no candidate " + candidate_id, "store");
}

std::vector<promptlab::ContributionLink> Engine::contribution(const std::string& candidate_id,
                                                              const std::string& keyword) {
  const auto ref = find_candidate(candidate_id);
  const auto& c = ref.session.iterations[ref.iteration].candidates[ref.candidate];
  auto prov = providers_for(ref.session);
  std::vector<imaging::RasterImage> views;
  std::vector<imaging::BinaryMask> masks;
  for (const auto& sha : c.view_blobs) {
    views.push_back(store_.get_blob(sha));
    masks.push_back(foreground(views.back(), *prov->segmentation));
  }
  return promptlab::contribution(to_lower(trim(keyword)), c.id, c.prompt, views, masks, *prov->attention);
}

providers::HealthReport Engine::health() const { return providers::health(defaults_.providers); }

ReplayResult replay(const Session& original, const std::filesystem::path& assets_dir,
                    const std::filesystem::path& scratch_root) {
  Engine engine(scratch_root, original.config, assets_dir, original.seed);
  engine.create_session(original.seed, original.config, original.id);
  for (const auto& cmd : original.commands) {
    if (cmd.kind == "iteration") {
      engine.run_iteration(original.id, cmd.prompt, cmd.options);
    } else if (cmd.kind == "keywords") {
      engine.apply_keyword(original.id, cmd.keywords);
    } else {
      throw Error(ErrorCode::corrupt_file, "unknown command " + cmd.kind, "replay");
    }
  }
  const auto a = to_json(original);
  const auto b = to_json(engine.load(original.id));
  ReplayResult r;
  for (const auto& op : nlohmann::json::diff(a, b)) r.differences.push_back(op.at("path").get<std::string>());
  r.identical = r.differences.empty();
  return r;
}

} // namespace forge3d::orchestrator
