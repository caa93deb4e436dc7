#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forge3d {

// Stable error taxonomy. The string form of each code is public API surface
// (returned by the HTTP gateway), so entries are only ever appended.
enum class ErrorCode {
  invalid_argument,
  empty_mask,
  mode_mismatch,
  no_foreground,
  unscorable,
  provider_error,
  config_error,
  range_violation,
  insufficient_data,
  unknown_metric,
  malformed,
  keyword_absent,
  no_scored_candidates,
  bad_radii,
  session_not_found,
  iteration_not_found,
  candidate_not_found,
  version_mismatch,
  corrupt_file,
  not_ready,
  io_error,
  total_failure,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string stage = {},
        bool retryable = false)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)),
        retryable_(retryable) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }
  bool retryable() const noexcept { return retryable_; }

private:
  ErrorCode code_;
  std::string stage_;
  bool retryable_;
};

} // namespace forge3d
