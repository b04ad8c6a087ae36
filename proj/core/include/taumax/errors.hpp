#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace taumax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state vector or matrix has the wrong shape for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid sampler / estimator configuration (step size, friction, lags, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The series carries no variance (or too little structure) to analyse.
class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

/// A potential or gradient evaluated to NaN/Inf. Carries the offending state.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::vector<double> state);
  const std::vector<double>& state() const noexcept { return state_; }

 private:
  std::vector<double> state_;
};

/// A step failed inside run_chain; wraps the step index.
class ChainError : public Error {
 public:
  ChainError(const std::string& what, std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The basis functions are (numerically) linearly dependent.
class CollinearBasisError : public Error {
 public:
  CollinearBasisError(const std::string& what, double condition);
  /// Smallest eigenvalue of C0 divided by its trace.
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Malformed input file. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace taumax
