#pragma once

#include <stdexcept>
#include <string>

namespace ccd {

// Error categories. The CLI maps code() directly to the process exit status,
// so the numeric values are part of the tool's interface.
enum class ErrorCode : int {
  ParseError = 10,
  DomainError = 11,
  DuplicateTestId = 12,
  NotFound = 13,
  InvalidFlip = 14,
  InvalidTrace = 15,
  TrainingError = 20,
  ContractViolation = 21,
  UndefinedFormula = 30,
  UndefinedTest = 31,
  ConfigError = 40,
  IoError = 50,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccd
