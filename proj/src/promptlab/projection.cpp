#include <Eigen/Dense>

#include "forge3d/common/error.hpp"
#include "forge3d/promptlab/promptlab.hpp"

namespace forge3d::promptlab {

std::vector<imaging::Point2> project_2d(const std::vector<providers::Embedding>& embeddings) {
  const auto n = static_cast<Eigen::Index>(embeddings.size());
  if (n < 2) throw Error(ErrorCode::insufficient_data, "projection needs at least 2 prompts", "promptlab");
  const auto d = static_cast<Eigen::Index>(embeddings.front().size());
  if (d == 0) throw Error(ErrorCode::insufficient_data, "empty embeddings", "promptlab");
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = embeddings[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(e.size()) != d) {
      throw Error(ErrorCode::config_error, "embedding dimensions differ", "promptlab");
    }
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = e[static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  // Eigenvalues ascend; take the two largest.
  std::vector<imaging::Point2> out(static_cast<std::size_t>(n));
  for (int c = 0; c < 2; ++c) {
    const Eigen::Index col = d - 1 - c;
    if (col < 0) break;
    Eigen::VectorXd axis = solver.eigenvectors().col(col);
    Eigen::Index pivot = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(axis(j)) > std::abs(axis(pivot)) + 1e-12) pivot = j;
    }
    if (axis(pivot) < 0) axis = -axis;
    const Eigen::VectorXd coords = x * axis;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& p = out[static_cast<std::size_t>(i)];
      (c == 0 ? p.x : p.y) = coords(i);
    }
  }
  return out;
}

std::vector<imaging::Point2> project_2d(std::span<const PromptRecord> prompts,
                                        providers::EmbeddingProvider& emb) {
  std::vector<providers::Embedding> embeddings;
  embeddings.reserve(prompts.size());
  for (const auto& p : prompts) embeddings.push_back(emb.embed_text(p.text));
  return project_2d(embeddings);
}

} // namespace forge3d::promptlab
