#pragma once

#include <fstream>

#include "fixtures.hpp"
#include "forge3d/orchestrator/engine.hpp"

namespace forge3d::testing {

/// Mock providers, small renders and few candidates so iterations stay fast.
inline orchestrator::EngineConfig small_config(std::size_t n = 4, std::size_t retrieval_k = 4) {
  orchestrator::EngineConfig c;
  c.n = n;
  c.retrieval_k = retrieval_k;
  c.providers.render_size = 64;
  return c;
}

inline orchestrator::IterationOptions options(std::size_t n) {
  orchestrator::IterationOptions o;
  o.n = n;
  return o;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace forge3d::testing
