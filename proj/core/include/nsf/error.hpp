#pragma once

#include <stdexcept>
#include <string>

namespace nsf {

enum class ErrorKind {
  NegativeInput,
  BadExponent,
  DegenerateGradient,
  EmptyState,
  BadConfig,
  BlowUp,
  DegenerateSamples,
  InadmissibleTestFunction,
  ParseError,
  UnknownKey,
  RangeError,
  IoError,
  HypothesisGate,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the time integrator; carries the time at which fields went bad.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace nsf
