#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tunneltime {

enum class ErrorCode {
  validation,
  no_open_channel,
  out_of_range,
  resummation_divergence,
  derivative_failure,
  step_size,
  log_singularity,
  regime_ambiguity,
  divergent_integrand,
  grid,
  config,
};

std::string_view to_string(ErrorCode code);

/// Exception type used throughout the library. The code is stable and is what
/// reports and the CLI key on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tunneltime
