#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge3d/common/error.hpp"
#include "forge3d/imaging/image.hpp"
#include "forge3d/scoring/multiview.hpp"

namespace forge3d::providers {

using Embedding = std::vector<double>;

enum class Branch { retrieval, generation };
std::string_view branch_name(Branch b) noexcept;
std::optional<Branch> parse_branch(std::string_view name) noexcept;

struct GenerationResult {
  std::string candidate_id;
  Branch branch = Branch::generation;
  std::string prompt;
  scoring::MultiViewSet views;
  std::optional<std::string> mesh_ref;  // opaque, passed through untouched
};

/// One contrastive judge request: two views plus the rendered instructions.
struct JudgeCall {
  std::string metric;
  std::string template_version;
  std::string template_text;
  std::string prompt_text;
  std::array<const imaging::RasterImage*, 2> images{};
  std::array<std::string, 2> image_hashes;
  std::array<int, 2> view_indices{};
};

class ProviderError : public Error {
public:
  ProviderError(const std::string& provider, const std::string& message, int attempts = 1)
      : Error(ErrorCode::provider_error, provider + ": " + message, "provider", true),
        provider_(provider), attempts_(attempts) {}

  const std::string& provider() const noexcept { return provider_; }
  int attempts() const noexcept { return attempts_; }

private:
  std::string provider_;
  int attempts_;
};

class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed_text(std::string_view text) = 0;
  virtual Embedding embed_image(const imaging::RasterImage& img) = 0;
};

class SegmentationProvider {
public:
  virtual ~SegmentationProvider() = default;
  /// Foreground mask; may be empty when nothing is found.
  virtual imaging::BinaryMask segment(const imaging::RasterImage& img) = 0;
};

class GenerationProvider {
public:
  virtual ~GenerationProvider() = default;
  virtual GenerationResult generate(const std::string& prompt, const std::string& candidate_id) = 0;
};

class RetrievalProvider {
public:
  virtual ~RetrievalProvider() = default;
  /// Up to k results, best match first. Candidate ids are the fixture ids.
  virtual std::vector<GenerationResult> retrieve(std::string_view query, std::size_t k) = 0;
};

class JudgeProvider {
public:
  virtual ~JudgeProvider() = default;
  /// Free-text model response; parsing happens in the judge module.
  virtual std::string evaluate(const JudgeCall& call) = 0;
};

class LlmProvider {
public:
  virtual ~LlmProvider() = default;
  virtual std::vector<std::string> augment(const std::string& prompt, std::size_t n,
                                           std::span<const std::string> modifiers,
                                           std::uint64_t seed) = 0;
};

class AttentionProvider {
public:
  virtual ~AttentionProvider() = default;
  /// Attention of `keyword` over one view, values in [0, 1].
  virtual imaging::ScalarMap attention(std::string_view keyword, std::string_view prompt,
                                       const imaging::RasterImage& view, int view_index) = 0;
};

} // namespace forge3d::providers
