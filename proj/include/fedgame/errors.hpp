#pragma once

#include <stdexcept>
#include <string>

namespace fedgame {

// Errors that stem from user-supplied configuration or input files.
// The CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Errors raised while running a valid scenario (divergence, degenerate data,
// misuse of an internal API). The CLI maps these to exit code 2.
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : ConfigError {
  using ConfigError::ConfigError;
};

struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

struct SchemaMismatch : ConfigError {
  using ConfigError::ConfigError;
};

struct OracleFailure : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct DegenerateLabels : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct InsufficientObservations : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct MixedTargets : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct NonFiniteGradient : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct CoalitionTooLarge : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace fedgame
