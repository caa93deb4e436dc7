#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "forge3d/providers/config.hpp"
#include "forge3d/providers/interfaces.hpp"

namespace forge3d::providers {

/// Bounds concurrent calls and retries provider failures with exponential
/// backoff. After kTripAfter consecutive exhausted calls the guard fails fast
/// for kCooldown, so a dead backend does not stall a whole iteration.
class CallGuard {
public:
  CallGuard(std::string name, const ProviderConfig& config);

  template <typename Fn>
  auto call(Fn&& fn) -> decltype(fn());

  const std::string& name() const noexcept { return name_; }

  static constexpr int kTripAfter = 6;
  static constexpr std::chrono::seconds kCooldown{30};

private:
  bool open() const;
  void record(bool success);

  void acquire() { slots_->acquire(); }
  void release() { slots_->release(); }
  [[noreturn]] void fail(const std::string& message, int attempts) const;
  void backoff(int attempt) const;

  std::string name_;
  int retries_;
  int backoff_ms_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
  mutable std::mutex state_mutex_;
  int consecutive_failures_ = 0;
  std::chrono::steady_clock::time_point open_until_{};
};

/// All external-model handles used by one engine run.
struct ProviderSet {
  std::shared_ptr<EmbeddingProvider> embedding;
  std::shared_ptr<SegmentationProvider> segmentation;
  std::shared_ptr<GenerationProvider> generation;
  std::shared_ptr<RetrievalProvider> retrieval;
  std::shared_ptr<JudgeProvider> judge;
  std::shared_ptr<LlmProvider> llm;
  std::shared_ptr<AttentionProvider> attention;
};

/// Builds guarded providers. Mocks are seeded from `seed` unless their config
/// pins a mock_seed.
ProviderSet make_providers(const ProvidersConfig& config, std::uint64_t seed);

/// Wraps an existing set (e.g. test doubles) with the limits of `config`.
ProviderSet guard_providers(ProviderSet raw, const ProvidersConfig& config);

enum class HealthStatus { ok, degraded, down };
std::string_view health_name(HealthStatus s) noexcept;

struct ProviderHealth {
  HealthStatus status = HealthStatus::ok;
  double latency_ms = 0.0;
  std::string detail;
};

struct HealthReport {
  HealthStatus overall = HealthStatus::ok;
  std::map<std::string, ProviderHealth> providers;
};

/// Mocks always report ok. HTTP providers are probed at <endpoint>/healthz up
/// to retries + 1 times, each bounded by the configured timeout.
HealthReport health(const ProvidersConfig& config);

// ---------------------------------------------------------------------------

template <typename Fn>
auto CallGuard::call(Fn&& fn) -> decltype(fn()) {
  if (open()) fail("circuit open after repeated failures", 0);
  for (int attempt = 0;; ++attempt) {
    std::string message;
    acquire();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        release();
        record(true);
        return;
      } else {
        auto result = fn();
        release();
        record(true);
        return result;
      }
    } catch (const ProviderError& e) {
      message = e.what();
    } catch (const Error&) {
      release();
      throw;
    } catch (const std::exception& e) {
      // Malformed payloads from remote adapters surface as parse errors.
      message = e.what();
    }
    release();
    if (attempt >= retries_) {
      record(false);
      fail(message, attempt + 1);
    }
    backoff(attempt);
  }
}

} // namespace forge3d::providers
