#include "forge3d/providers/registry.hpp"

#include <thread>

#include "forge3d/providers/http.hpp"
#include "forge3d/providers/mock.hpp"

namespace forge3d::providers {

CallGuard::CallGuard(std::string name, const ProviderConfig& config)
    : name_(std::move(name)), retries_(config.retries), backoff_ms_(config.backoff_ms),
      slots_(std::make_unique<std::counting_semaphore<1024>>(std::min(config.in_flight, 1024))) {}

void CallGuard::fail(const std::string& message, int attempts) const {
  throw ProviderError(name_, message + " (after " + std::to_string(attempts) + " attempts)",
                      attempts);
}

bool CallGuard::open() const {
  std::lock_guard lock(state_mutex_);
  return consecutive_failures_ >= kTripAfter && std::chrono::steady_clock::now() < open_until_;
}

void CallGuard::record(bool success) {
  std::lock_guard lock(state_mutex_);
  if (success) {
    consecutive_failures_ = 0;
    return;
  }
  if (++consecutive_failures_ >= kTripAfter) open_until_ = std::chrono::steady_clock::now() + kCooldown;
}

void CallGuard::backoff(int attempt) const {
  if (backoff_ms_ <= 0) return;
  std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long long>(backoff_ms_) << attempt));
}

namespace {

class GuardedEmbedding final : public EmbeddingProvider {
public:
  GuardedEmbedding(std::shared_ptr<EmbeddingProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("embedding", c) {}
  Embedding embed_text(std::string_view text) override {
    return guard_.call([&] { return inner_->embed_text(text); });
  }
  Embedding embed_image(const imaging::RasterImage& img) override {
    return guard_.call([&] { return inner_->embed_image(img); });
  }

private:
  std::shared_ptr<EmbeddingProvider> inner_;
  CallGuard guard_;
};

class GuardedSegmentation final : public SegmentationProvider {
public:
  GuardedSegmentation(std::shared_ptr<SegmentationProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("segmentation", c) {}
  imaging::BinaryMask segment(const imaging::RasterImage& img) override {
    return guard_.call([&] { return inner_->segment(img); });
  }

private:
  std::shared_ptr<SegmentationProvider> inner_;
  CallGuard guard_;
};

class GuardedGeneration final : public GenerationProvider {
public:
  GuardedGeneration(std::shared_ptr<GenerationProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("generation", c) {}
  GenerationResult generate(const std::string& prompt, const std::string& id) override {
    return guard_.call([&] { return inner_->generate(prompt, id); });
  }

private:
  std::shared_ptr<GenerationProvider> inner_;
  CallGuard guard_;
};

class GuardedRetrieval final : public RetrievalProvider {
public:
  GuardedRetrieval(std::shared_ptr<RetrievalProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("retrieval", c) {}
  std::vector<GenerationResult> retrieve(std::string_view query, std::size_t k) override {
    return guard_.call([&] { return inner_->retrieve(query, k); });
  }

private:
  std::shared_ptr<RetrievalProvider> inner_;
  CallGuard guard_;
};

class GuardedJudge final : public JudgeProvider {
public:
  GuardedJudge(std::shared_ptr<JudgeProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("judge", c) {}
  std::string evaluate(const JudgeCall& call) override {
    return guard_.call([&] { return inner_->evaluate(call); });
  }

private:
  std::shared_ptr<JudgeProvider> inner_;
  CallGuard guard_;
};

class GuardedLlm final : public LlmProvider {
public:
  GuardedLlm(std::shared_ptr<LlmProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("llm", c) {}
  std::vector<std::string> augment(const std::string& prompt, std::size_t n,
                                   std::span<const std::string> modifiers,
                                   std::uint64_t seed) override {
    return guard_.call([&] { return inner_->augment(prompt, n, modifiers, seed); });
  }

private:
  std::shared_ptr<LlmProvider> inner_;
  CallGuard guard_;
};

class GuardedAttention final : public AttentionProvider {
public:
  GuardedAttention(std::shared_ptr<AttentionProvider> inner, const ProviderConfig& c)
      : inner_(std::move(inner)), guard_("attention", c) {}
  imaging::ScalarMap attention(std::string_view keyword, std::string_view prompt,
                               const imaging::RasterImage& view, int view_index) override {
    return guard_.call([&] { return inner_->attention(keyword, prompt, view, view_index); });
  }

private:
  std::shared_ptr<AttentionProvider> inner_;
  CallGuard guard_;
};

std::uint64_t mock_seed(const ProviderConfig& c, std::uint64_t seed) {
  return c.mock_seed.value_or(seed);
}

} // namespace

ProviderSet guard_providers(ProviderSet raw, const ProvidersConfig& c) {
  ProviderSet out;
  if (raw.embedding) out.embedding = std::make_shared<GuardedEmbedding>(raw.embedding, c.embedding);
  if (raw.segmentation) {
    out.segmentation = std::make_shared<GuardedSegmentation>(raw.segmentation, c.segmentation);
  }
  if (raw.generation) out.generation = std::make_shared<GuardedGeneration>(raw.generation, c.generation);
  if (raw.retrieval) out.retrieval = std::make_shared<GuardedRetrieval>(raw.retrieval, c.retrieval);
  if (raw.judge) out.judge = std::make_shared<GuardedJudge>(raw.judge, c.judge);
  if (raw.llm) out.llm = std::make_shared<GuardedLlm>(raw.llm, c.llm);
  if (raw.attention) out.attention = std::make_shared<GuardedAttention>(raw.attention, c.attention);
  return out;
}

ProviderSet make_providers(const ProvidersConfig& c, std::uint64_t seed) {
  const auto is_mock = [](const ProviderConfig& p) { return p.kind == ProviderKind::mock; };
  ProviderSet raw;
  if (is_mock(c.embedding)) {
    raw.embedding = std::make_shared<MockEmbedding>(mock_seed(c.embedding, seed), c.embedding_dim);
  } else {
    raw.embedding = std::make_shared<HttpEmbedding>(c.embedding);
  }
  if (is_mock(c.segmentation)) raw.segmentation = std::make_shared<MockSegmentation>();
  else raw.segmentation = std::make_shared<HttpSegmentation>(c.segmentation);
  if (is_mock(c.generation)) {
    raw.generation = std::make_shared<MockGeneration>(mock_seed(c.generation, seed), c.render_size);
  } else {
    raw.generation = std::make_shared<HttpGeneration>(c.generation);
  }
  if (is_mock(c.retrieval)) {
    raw.retrieval = std::make_shared<MockRetrieval>(mock_seed(c.retrieval, seed), c.render_size,
                                                    c.embedding_dim);
  } else {
    raw.retrieval = std::make_shared<HttpRetrieval>(c.retrieval);
  }
  if (is_mock(c.judge)) {
    MockJudge::Scenario scenario;
    if (!c.judge.scenario.empty()) scenario = MockJudge::load_scenario(c.judge.scenario);
    raw.judge = std::make_shared<MockJudge>(mock_seed(c.judge, seed), std::move(scenario));
  } else {
    raw.judge = std::make_shared<HttpJudge>(c.judge);
  }
  if (is_mock(c.llm)) raw.llm = std::make_shared<MockLlm>();
  else raw.llm = std::make_shared<HttpLlm>(c.llm);
  if (is_mock(c.attention)) {
    raw.attention = std::make_shared<MockAttention>(mock_seed(c.attention, seed));
  } else {
    raw.attention = std::make_shared<HttpAttention>(c.attention);
  }
  return guard_providers(std::move(raw), c);
}

std::string_view health_name(HealthStatus s) noexcept {
  switch (s) {
  case HealthStatus::ok: return "ok";
  case HealthStatus::degraded: return "degraded";
  case HealthStatus::down: return "down";
  }
  return "down";
}

HealthReport health(const ProvidersConfig& c) {
  HealthReport report;
  const std::pair<const char*, const ProviderConfig*> entries[] = {
      {"embedding", &c.embedding}, {"segmentation", &c.segmentation},
      {"generation", &c.generation}, {"retrieval", &c.retrieval},
      {"judge", &c.judge},         {"llm", &c.llm},
      {"attention", &c.attention}};
  std::size_t down = 0;
  for (const auto& [name, pc] : entries) {
    ProviderHealth h;
    const auto start = std::chrono::steady_clock::now();
    if (pc->kind == ProviderKind::mock) {
      h.detail = "mock";
    } else {
      bool ok = false;
      try {
        const HttpTransport transport(name, *pc);
        for (int attempt = 0; attempt <= pc->retries && !ok; ++attempt) ok = transport.healthy();
      } catch (const Error& e) {
        h.detail = e.what();
      }
      if (!ok) {
        h.status = HealthStatus::down;
        if (h.detail.empty()) h.detail = "unreachable: " + pc->endpoint;
        ++down;
      }
    }
    h.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                       .count();
    report.providers[name] = h;
  }
  if (down == std::size(entries)) report.overall = HealthStatus::down;
  else if (down > 0) report.overall = HealthStatus::degraded;
  return report;
}

} // namespace forge3d::providers

namespace forge3d::providers {

std::string_view branch_name(Branch b) noexcept {
  return b == Branch::retrieval ? "retrieval" : "generation";
}

std::optional<Branch> parse_branch(std::string_view name) noexcept {
  if (name == "retrieval") return Branch::retrieval;
  if (name == "generation") return Branch::generation;
  return std::nullopt;
}

} // namespace forge3d::providers
