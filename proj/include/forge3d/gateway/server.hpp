#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <json.hpp>

#include "forge3d/common/error.hpp"
#include "forge3d/orchestrator/engine.hpp"

namespace httplib {
class Server;
}

namespace forge3d::gateway {

struct ApiError {
  std::string code;
  std::string message;
  std::string stage;
  bool retryable = false;
  int http_status = 500;

  nlohmann::json to_json() const;
};

int http_status(ErrorCode code) noexcept;
ApiError to_api_error(const Error& e);

/// Runs queued jobs one at a time per key, keys in parallel.
class SerialExecutor {
public:
  ~SerialExecutor();
  void submit(const std::string& key, std::function<void()> job);
  /// Blocks until every queue is empty and idle.
  void drain();

private:
  struct Lane {
    std::deque<std::function<void()>> jobs;
    bool busy = false;
    std::jthread worker;
  };
  void run(const std::string& key);

  std::mutex mutex_;
  std::condition_variable work_;
  std::condition_variable idle_;
  std::map<std::string, std::unique_ptr<Lane>> lanes_;
  bool stopping_ = false;
};

class Api {
public:
  explicit Api(orchestrator::Engine& engine) : engine_(engine) {}

  /// Registers every endpoint on `server`.
  void mount(httplib::Server& server);
  void drain() { executor_.drain(); }

  // Response bodies, exposed for tests and the CLI.
  nlohmann::json session_view(const orchestrator::Session& s) const;
  nlohmann::json iteration_view(const orchestrator::Session& s, const orchestrator::Iteration& it) const;
  nlohmann::json candidate_view(const orchestrator::Session& s, const orchestrator::Iteration& it,
                                const orchestrator::CandidateRecord& c) const;

private:
  orchestrator::Engine& engine_;
  SerialExecutor executor_;
};

/// Blocks serving on host:port until stopped. Returns false if binding fails.
bool serve(orchestrator::Engine& engine, const std::string& host, int port,
           const std::function<void(httplib::Server&)>& on_ready = {});

} // namespace forge3d::gateway
