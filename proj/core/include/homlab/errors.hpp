#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homlab {

/// Invalid user-supplied parameters or configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A medium was queried outside the region its randomness was sampled on.
class ExtentError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A numerical procedure failed (divergence, non-convergence, bad data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver gave up; carries the residual history it observed.
class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : NumericalError(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace homlab
