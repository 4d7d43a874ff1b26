#pragma once

#include <stdexcept>
#include <string>

namespace iikl {

// Base of every error raised by the library. kind() is the stable,
// machine-readable tag the CLI puts into its error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

/// Invalid configuration or hyperparameters (CLI exit status 2).
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

/// Malformed input values: dimension mismatches, out-of-range indices.
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input_error"; }
};

/// NaN or Inf encountered during evaluation or optimization.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric_error"; }
};

/// API misuse, e.g. a forward cache that no longer matches its network.
class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage_error"; }
};

/// File could not be parsed. Messages cite row/column where possible.
class LoadError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "load_error"; }
};

/// An evaluation could not produce a value (disconnected graph, all pairs degenerate).
class EvalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "eval_error"; }
};

}  // namespace iikl
