#include "forge3d/providers/config.hpp"

#include <set>

#include "forge3d/common/error.hpp"

namespace forge3d::providers {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, where + " must be an object", "config");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::config_error, "unknown key '" + key + "' in " + where, "config");
    }
  }
}

} // namespace

ProviderConfig provider_config_from_json(const json& j) {
  reject_unknown(j, {"kind", "endpoint", "token_env", "timeout_ms", "retries", "in_flight",
                     "backoff_ms", "mock_seed", "scenario"},
                 "provider config");
  ProviderConfig c;
  try {
    const auto kind = j.value("kind", std::string("mock"));
    if (kind == "mock") c.kind = ProviderKind::mock;
    else if (kind == "http") c.kind = ProviderKind::http;
    else throw Error(ErrorCode::config_error, "provider kind must be mock or http", "config");
    c.endpoint = j.value("endpoint", std::string{});
    c.token_env = j.value("token_env", std::string{});
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.retries = j.value("retries", c.retries);
    c.in_flight = j.value("in_flight", c.in_flight);
    c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
    if (j.contains("mock_seed")) c.mock_seed = j.at("mock_seed").get<std::uint64_t>();
    c.scenario = j.value("scenario", std::string{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("provider config: ") + e.what(), "config");
  }
  if (c.kind == ProviderKind::http && c.endpoint.empty()) {
    throw Error(ErrorCode::config_error, "http provider needs an endpoint", "config");
  }
  if (c.timeout_ms <= 0 || c.retries < 0 || c.in_flight < 1 || c.backoff_ms < 0) {
    throw Error(ErrorCode::config_error, "provider limits out of range", "config");
  }
  return c;
}

json to_json(const ProviderConfig& c) {
  json j{{"kind", c.kind == ProviderKind::mock ? "mock" : "http"},
         {"timeout_ms", c.timeout_ms},
         {"retries", c.retries},
         {"in_flight", c.in_flight},
         {"backoff_ms", c.backoff_ms}};
  if (!c.endpoint.empty()) j["endpoint"] = c.endpoint;
  if (!c.token_env.empty()) j["token_env"] = c.token_env;
  if (c.mock_seed) j["mock_seed"] = *c.mock_seed;
  if (!c.scenario.empty()) j["scenario"] = c.scenario;
  return j;
}

ProvidersConfig providers_config_from_json(const json& j) {
  reject_unknown(j, {"embedding", "segmentation", "generation", "retrieval", "judge", "llm",
                     "attention", "embedding_dim", "render_size"},
                 "providers");
  ProvidersConfig c;
  const auto read = [&](const char* key, ProviderConfig& dst) {
    if (j.contains(key)) dst = provider_config_from_json(j.at(key));
  };
  read("embedding", c.embedding);
  read("segmentation", c.segmentation);
  read("generation", c.generation);
  read("retrieval", c.retrieval);
  read("judge", c.judge);
  read("llm", c.llm);
  read("attention", c.attention);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.render_size = j.value("render_size", c.render_size);
  if (c.embedding_dim < 2) throw Error(ErrorCode::config_error, "embedding_dim must be >= 2", "config");
  if (c.render_size < 16) throw Error(ErrorCode::config_error, "render_size must be >= 16", "config");
  return c;
}

json to_json(const ProvidersConfig& c) {
  return json{{"embedding", to_json(c.embedding)},   {"segmentation", to_json(c.segmentation)},
              {"generation", to_json(c.generation)}, {"retrieval", to_json(c.retrieval)},
              {"judge", to_json(c.judge)},           {"llm", to_json(c.llm)},
              {"attention", to_json(c.attention)},   {"embedding_dim", c.embedding_dim},
              {"render_size", c.render_size}};
}

} // namespace forge3d::providers
