#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lipselect {

enum class ErrorKind {
  identifier,
  configuration,
  schema,
  shape,
  precondition,
  parameter,
  range,
  rank_deficiency,
  convergence,
  degenerate_radius,
  rate,
  invariant,
  resolution,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error thrown by the library. The kind drives the CLI exit
/// status (see cli.hpp).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A numeric parameter outside its admissible range; carries the parameter
/// name so front ends can report it.
class ParameterError : public Error {
 public:
  ParameterError(std::string parameter, const std::string& what)
      : Error(ErrorKind::parameter, what), parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, const std::string& what)
      : Error(ErrorKind::convergence, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Raised when a strong pointwise bound fails at a sampled point.
class RateError : public Error {
 public:
  RateError(std::size_t witness, double slack, const std::string& what)
      : Error(ErrorKind::rate, what), witness_(witness), slack_(slack) {}

  std::size_t witness() const noexcept { return witness_; }
  /// Negative: amount by which the bound was exceeded.
  double slack() const noexcept { return slack_; }

 private:
  std::size_t witness_;
  double slack_;
};

class DegenerateRadiusError : public Error {
 public:
  DegenerateRadiusError(std::size_t anchor, int round, const std::string& what)
      : Error(ErrorKind::degenerate_radius, what), anchor_(anchor), round_(round) {}

  std::size_t anchor() const noexcept { return anchor_; }
  int round() const noexcept { return round_; }

 private:
  std::size_t anchor_;
  int round_;
};

}  // namespace lipselect
