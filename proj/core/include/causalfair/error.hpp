#pragma once

#include <stdexcept>
#include <string>

namespace causalfair {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown attribute or value, mismatched attribute spaces, malformed inputs.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A conditional frequency or probability whose conditioning event has no mass.
class UndefinedConditionalError : public DomainError {
 public:
  explicit UndefinedConditionalError(const std::string& what)
      : DomainError("undefined conditional: " + what) {}
};

// Exhaustive enumeration would exceed the configured state cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A requested target (confidence, flip probability) cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Classifier tweaking was requested before the training data met the threshold.
class PhaseOrderError : public Error {
 public:
  using Error::Error;
};

}  // namespace causalfair
