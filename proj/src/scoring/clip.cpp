#include "forge3d/scoring/clip.hpp"

#include <algorithm>
#include <cmath>

namespace forge3d::scoring {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::config_error,
                "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()),
                "scoring");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::provider_error, "embedding has zero length", "scoring");
  }
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

ClipResult clip_score(std::string_view text, const imaging::RasterImage& img,
                      providers::EmbeddingProvider& emb) {
  const auto t = emb.embed_text(text);
  const auto i = emb.embed_image(img);
  const double c = cosine(t, i);
  return {c, normalize_cosine(c)};
}

ClipIResult clip_i_from_embeddings(std::span<const providers::Embedding> embeddings) {
  if (embeddings.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "CLIP-I needs a front view and at least one other",
                "scoring");
  }
  ClipIResult r;
  double norm_sum = 0.0;
  double raw_sum = 0.0;
  r.minimum = 1.0;
  for (std::size_t j = 1; j < embeddings.size(); ++j) {
    const double c = cosine(embeddings[0], embeddings[j]);
    const double n = normalize_cosine(c);
    r.per_view_raw.push_back(c);
    r.per_view_normalized.push_back(n);
    norm_sum += n;
    raw_sum += c;
    r.minimum = std::min(r.minimum, n);
  }
  const auto count = static_cast<double>(embeddings.size() - 1);
  r.aggregate = norm_sum / count;
  r.raw_mean = raw_sum / count;
  return r;
}

ClipIResult clip_i(const MultiViewSet& set, providers::EmbeddingProvider& emb) {
  set.validate();
  std::vector<providers::Embedding> embeddings;
  embeddings.reserve(set.views.size());
  for (const auto& v : set.views) embeddings.push_back(emb.embed_image(v));
  return clip_i_from_embeddings(embeddings);
}

} // namespace forge3d::scoring
