#pragma once

#include <stdexcept>

namespace chromahom {

// Scenario/configuration validation failure. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data-dependent analysis failure: no half-maximum crossing, missing baseline
// coverage, degenerate estimator input. Mapped to exit code 3.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fit rejected its input or failed to converge. Mapped to exit code 3.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chromahom
