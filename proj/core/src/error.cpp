#include "nsf/error.hpp"

namespace nsf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::EmptyState: return "EmptyState";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::DegenerateSamples: return "DegenerateSamples";
    case ErrorKind::InadmissibleTestFunction: return "InadmissibleTestFunction";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::HypothesisGate: return "HypothesisGate";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

BlowUpError::BlowUpError(double time, const std::string& what)
    : Error(ErrorKind::BlowUp, what + " at t=" + std::to_string(time)), time_(time) {}

}  // namespace nsf
