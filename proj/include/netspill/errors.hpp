#pragma once

#include <stdexcept>
#include <string>

namespace netspill {

/// Invalid argument or violated precondition of a library operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message names the offending line.
class FormatError : public IoError {
 public:
  FormatError(const std::string& what, std::size_t line)
      : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Base class of numerical failures (convergence, stability, calibration).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : NumericError(what + " (last residual " + std::to_string(last_residual) + ")"),
        residual_(last_residual) {}
  double last_residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Layer 2 alone is above its epidemic threshold, so the layer-1 threshold is undefined.
class SupercriticalError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Mean-field integration drifted outside the probability simplex.
class StepSizeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class CalibrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Spillover probability never crossed the threshold inside a bisection bracket.
class BoundaryError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace netspill
