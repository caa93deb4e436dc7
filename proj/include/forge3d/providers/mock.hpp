#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "forge3d/providers/interfaces.hpp"

namespace forge3d::providers {

/// Deterministic unit vector for a string.
Embedding hash_unit_vector(std::string_view text, std::uint64_t seed, int dim);

class MockEmbedding final : public EmbeddingProvider {
public:
  MockEmbedding(std::uint64_t seed, int dim = 64);

  /// Normalized sum of per-token hash vectors, so prompts sharing words are
  /// close.
  Embedding embed_text(std::string_view text) override;
  /// Seeded random projection of a coarse color layout.
  Embedding embed_image(const imaging::RasterImage& img) override;

private:
  std::uint64_t seed_;
  int dim_;
  std::vector<double> projection_;  // dim x kFeatures
};

/// Foreground = pixels that differ from the corner color.
class MockSegmentation final : public SegmentationProvider {
public:
  imaging::BinaryMask segment(const imaging::RasterImage& img) override;
};

class MockGeneration final : public GenerationProvider {
public:
  MockGeneration(std::uint64_t seed, int size) : seed_(seed), size_(size) {}
  GenerationResult generate(const std::string& prompt, const std::string& candidate_id) override;

private:
  std::uint64_t seed_;
  int size_;
};

struct Fixture {
  std::string id;
  std::string prompt;
};

/// Bundled retrieval corpus (24 prompts).
const std::vector<Fixture>& retrieval_fixtures();

class MockRetrieval final : public RetrievalProvider {
public:
  MockRetrieval(std::uint64_t seed, int size, int embedding_dim = 64);
  /// Fixtures ranked by mock text-embedding cosine to the query; ties by id.
  std::vector<GenerationResult> retrieve(std::string_view query, std::size_t k) override;

private:
  MockEmbedding embedding_;
  int size_;
};

/// Judge mock. Without a scenario it scores a pair by color agreement of the
/// two views (plus a small hash jitter). Scenario files script responses:
///   {"mode": "default" | "fail" | "malformed",
///    "responses": {"<metric>": ["<text for pair 0>", ...]},
///    "default_response": "<text>"}
class MockJudge final : public JudgeProvider {
public:
  struct Scenario {
    std::string mode = "default";
    std::map<std::string, std::vector<std::string>> responses;
    std::string default_response;
  };

  explicit MockJudge(std::uint64_t seed) : seed_(seed) {}
  MockJudge(std::uint64_t seed, Scenario scenario)
      : seed_(seed), scenario_(std::move(scenario)) {}

  static Scenario load_scenario(const std::filesystem::path& path);

  std::string evaluate(const JudgeCall& call) override;

private:
  std::uint64_t seed_;
  Scenario scenario_;
};

/// Appends corpus modifiers to the prompt, deterministically from the seed.
class MockLlm final : public LlmProvider {
public:
  std::vector<std::string> augment(const std::string& prompt, std::size_t n,
                                   std::span<const std::string> modifiers,
                                   std::uint64_t seed) override;
};

/// Gaussian blob whose centre is offset by a hash of the keyword and swings
/// with the view yaw.
class MockAttention final : public AttentionProvider {
public:
  explicit MockAttention(std::uint64_t seed) : seed_(seed) {}
  imaging::ScalarMap attention(std::string_view keyword, std::string_view prompt,
                               const imaging::RasterImage& view, int view_index) override;

private:
  std::uint64_t seed_;
};

} // namespace forge3d::providers
