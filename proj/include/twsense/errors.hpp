#pragma once

#include <stdexcept>
#include <string>

namespace twsense {

// Precondition violations on public entry points.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is not defined for the given input (e.g. a perfect conductor used as a medium).
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double frequency_hz)
      : std::runtime_error(what), frequency_hz_(frequency_hz) {}
  double frequency_hz() const noexcept { return frequency_hz_; }

 private:
  double frequency_hz_;
};

class DegenerateCalibration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best_residual_rms)
      : std::runtime_error(what), best_residual_rms_(best_residual_rms) {}
  double best_residual_rms() const noexcept { return best_residual_rms_; }

 private:
  double best_residual_rms_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace twsense
