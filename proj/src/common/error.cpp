#include "forge3d/common/error.hpp"

namespace forge3d {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::invalid_argument: return "invalid_argument";
  case ErrorCode::empty_mask: return "empty_mask";
  case ErrorCode::mode_mismatch: return "mode_mismatch";
  case ErrorCode::no_foreground: return "no_foreground";
  case ErrorCode::unscorable: return "unscorable";
  case ErrorCode::provider_error: return "provider_error";
  case ErrorCode::config_error: return "config_error";
  case ErrorCode::range_violation: return "range_violation";
  case ErrorCode::insufficient_data: return "insufficient_data";
  case ErrorCode::unknown_metric: return "unknown_metric";
  case ErrorCode::malformed: return "malformed";
  case ErrorCode::keyword_absent: return "keyword_absent";
  case ErrorCode::no_scored_candidates: return "no_scored_candidates";
  case ErrorCode::bad_radii: return "bad_radii";
  case ErrorCode::session_not_found: return "session_not_found";
  case ErrorCode::iteration_not_found: return "iteration_not_found";
  case ErrorCode::candidate_not_found: return "candidate_not_found";
  case ErrorCode::version_mismatch: return "version_mismatch";
  case ErrorCode::corrupt_file: return "corrupt_file";
  case ErrorCode::not_ready: return "not_ready";
  case ErrorCode::io_error: return "io_error";
  case ErrorCode::total_failure: return "total_failure";
  }
  return "unknown";
}

} // namespace forge3d
