#pragma once

#include <stdexcept>
#include <string>

namespace fpdeconv {

// Raised for invalid user-facing configuration (unknown keys, bad values,
// violated domain guards at load time). Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical stage fails: eigensolver failure, fixed-point
// non-convergence, particle collision in the SDE backend, non-finite output.
// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double last_residual, int iterations)
      : NumericalError(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace fpdeconv
