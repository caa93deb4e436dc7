#pragma once

#include <atomic>
#include <functional>
#include <mutex>

#include "forge3d/providers/interfaces.hpp"

namespace forge3d::testing {

struct FixedSegmentation final : providers::SegmentationProvider {
  imaging::BinaryMask mask;
  explicit FixedSegmentation(imaging::BinaryMask m) : mask(std::move(m)) {}
  imaging::BinaryMask segment(const imaging::RasterImage&) override { return mask; }
};

/// Foreground = pixels that differ from the top-left pixel.
struct CornerSegmentation final : providers::SegmentationProvider {
  imaging::BinaryMask segment(const imaging::RasterImage& img) override {
    imaging::BinaryMask m(img.width(), img.height());
    const auto bg = img.at(0, 0);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) m.set(x, y, !(img.at(x, y) == bg));
    }
    return m;
  }
};

/// Judge whose response is produced by a callback; counts calls.
struct ScriptedJudge final : providers::JudgeProvider {
  std::function<std::string(const providers::JudgeCall&, int)> respond;
  std::atomic<int> calls{0};
  explicit ScriptedJudge(std::function<std::string(const providers::JudgeCall&, int)> f)
      : respond(std::move(f)) {}
  std::string evaluate(const providers::JudgeCall& call) override { return respond(call, calls++); }
};

struct FixedEmbedding final : providers::EmbeddingProvider {
  providers::Embedding text, image;
  providers::Embedding embed_text(std::string_view) override { return text; }
  providers::Embedding embed_image(const imaging::RasterImage&) override { return image; }
};

} // namespace forge3d::testing
