#pragma once

#include <stdexcept>
#include <string>

namespace fvsg {

// Raised for inconsistent problem setups (bad flux/pressure combination,
// boundary data out of admissible range, unknown configuration keys, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an implicit step cannot be completed (Newton stagnation,
// singular system). Carries the last residual in the message.
struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), residual(last_residual) {}
  double residual;
};

}  // namespace fvsg
