#pragma once

#include <stdexcept>
#include <string>

namespace noneq {

/// Invalid argument to an operation (negative time, non-positive step, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sampling time at or below the divergence threshold of the Gaussian flow.
class ThresholdError : public ParameterError {
 public:
  ThresholdError(const std::string& what, double k_star) : ParameterError(what), k_star(k_star) {}
  double k_star;
};

/// State space too large to enumerate.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Numerical procedure failed: no convergence, bad bracket, singular point.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Input matrix or operator violates a structural precondition
/// (asymmetry, detailed balance, degenerate spectrum).
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file, config, or checkpoint.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file problem; `line` is 0 when no single line is at fault.
class ConfigError : public FormatError {
 public:
  ConfigError(const std::string& what, int line) : FormatError(what), line(line) {}
  int line;
};

}  // namespace noneq
