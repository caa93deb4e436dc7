#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "forge3d/providers/config.hpp"
#include "forge3d/providers/interfaces.hpp"

namespace forge3d::providers {

struct Url {
  std::string scheme_host_port;  // http://host:port
  std::string path;              // starts with '/'
};

/// Throws config_error on anything but http://host[:port][/path].
Url parse_url(const std::string& url);

/// JSON-over-HTTP transport shared by the adapters. One attempt per call;
/// retries are layered on top by the guard.
class HttpTransport {
public:
  HttpTransport(std::string name, ProviderConfig config);

  nlohmann::json post_json(const std::string& suffix, const nlohmann::json& body) const;
  std::string post_text(const std::string& suffix, const std::string& body) const;
  /// GET <base>/healthz; true on HTTP 200.
  bool healthy() const;

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
  ProviderConfig config_;
  Url url_;
};

std::string encode_image_b64(const imaging::RasterImage& img);
imaging::RasterImage decode_image_b64(const std::string& text);

// Wire formats (all JSON):
//   embedding    POST <path>/text {text} and <path>/image {image} -> [floats]
//   segmentation POST <path> {image} -> {mask: base64 PNG, foreground = bright}
//   generation   POST <path> {prompt, candidate_id} -> {views: [9 x base64 PNG], mesh_ref?}
//   retrieval    POST <path> {query, k} -> {results: [{id, prompt, views: [...]}]}
//   judge        POST <path> {template_text, images: [2 x base64 PNG], metric} -> free text
//   llm          POST <path> {prompt, n, modifiers, seed} -> {prompts: [...]}
//   attention    POST <path> {keyword, prompt, image, view_index} -> {map: base64 PNG}

class HttpEmbedding final : public EmbeddingProvider {
public:
  explicit HttpEmbedding(ProviderConfig c) : t_("embedding", std::move(c)) {}
  Embedding embed_text(std::string_view text) override;
  Embedding embed_image(const imaging::RasterImage& img) override;

private:
  HttpTransport t_;
};

class HttpSegmentation final : public SegmentationProvider {
public:
  explicit HttpSegmentation(ProviderConfig c) : t_("segmentation", std::move(c)) {}
  imaging::BinaryMask segment(const imaging::RasterImage& img) override;

private:
  HttpTransport t_;
};

class HttpGeneration final : public GenerationProvider {
public:
  explicit HttpGeneration(ProviderConfig c) : t_("generation", std::move(c)) {}
  GenerationResult generate(const std::string& prompt, const std::string& candidate_id) override;

private:
  HttpTransport t_;
};

class HttpRetrieval final : public RetrievalProvider {
public:
  explicit HttpRetrieval(ProviderConfig c) : t_("retrieval", std::move(c)) {}
  std::vector<GenerationResult> retrieve(std::string_view query, std::size_t k) override;

private:
  HttpTransport t_;
};

class HttpJudge final : public JudgeProvider {
public:
  explicit HttpJudge(ProviderConfig c) : t_("judge", std::move(c)) {}
  std::string evaluate(const JudgeCall& call) override;

private:
  HttpTransport t_;
};

class HttpLlm final : public LlmProvider {
public:
  explicit HttpLlm(ProviderConfig c) : t_("llm", std::move(c)) {}
  std::vector<std::string> augment(const std::string& prompt, std::size_t n,
                                   std::span<const std::string> modifiers,
                                   std::uint64_t seed) override;

private:
  HttpTransport t_;
};

class HttpAttention final : public AttentionProvider {
public:
  explicit HttpAttention(ProviderConfig c) : t_("attention", std::move(c)) {}
  imaging::ScalarMap attention(std::string_view keyword, std::string_view prompt,
                               const imaging::RasterImage& view, int view_index) override;

private:
  HttpTransport t_;
};

} // namespace forge3d::providers
