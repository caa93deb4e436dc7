#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "forge3d/imaging/image.hpp"
#include "forge3d/providers/interfaces.hpp"
#include "forge3d/scoring/multiview.hpp"

namespace forge3d::scoring {

/// Cosine similarity. Throws config_error on dimension mismatch and
/// provider_error on zero-length vectors.
double cosine(std::span<const double> a, std::span<const double> b);

/// Maps a cosine in [-1, 1] to [0, 1].
inline double normalize_cosine(double c) noexcept { return (c + 1.0) / 2.0; }

struct ClipResult {
  double raw = 0.0;
  double normalized = 0.0;
};

ClipResult clip_score(std::string_view text, const imaging::RasterImage& img,
                      providers::EmbeddingProvider& emb);

struct ClipIResult {
  std::vector<double> per_view_raw;         // views 1..8 against view 0
  std::vector<double> per_view_normalized;
  double aggregate = 0.0;                   // mean of normalized values
  double minimum = 0.0;
  double raw_mean = 0.0;
};

/// Front view against each other view, from precomputed embeddings
/// (index 0 is the front).
ClipIResult clip_i_from_embeddings(std::span<const providers::Embedding> embeddings);
ClipIResult clip_i(const MultiViewSet& set, providers::EmbeddingProvider& emb);

} // namespace forge3d::scoring
