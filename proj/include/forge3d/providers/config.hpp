#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace forge3d::providers {

enum class ProviderKind { mock, http };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::mock;
  std::string endpoint;            // http only, e.g. http://127.0.0.1:9000/embed
  std::string token_env;           // name of the env var holding a bearer token
  int timeout_ms = 30000;
  int retries = 2;
  int in_flight = 4;
  int backoff_ms = 250;            // first retry delay, doubled per attempt
  std::optional<std::uint64_t> mock_seed;  // overrides the session seed
  std::string scenario;            // judge mock: path to a scenario file

  friend bool operator==(const ProviderConfig&, const ProviderConfig&) = default;
};

struct ProvidersConfig {
  ProviderConfig embedding;
  ProviderConfig segmentation;
  ProviderConfig generation;
  ProviderConfig retrieval;
  ProviderConfig judge;
  ProviderConfig llm;
  ProviderConfig attention;
  int embedding_dim = 64;  // mock embeddings
  int render_size = 256;   // mock renders and fixtures

  friend bool operator==(const ProvidersConfig&, const ProvidersConfig&) = default;
};

/// Unknown keys are rejected with config_error so typos do not go unnoticed.
ProviderConfig provider_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProviderConfig& c);
ProvidersConfig providers_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProvidersConfig& c);

} // namespace forge3d::providers
