#pragma once

#include <stdexcept>
#include <string>

namespace clickstat {

enum class ErrorCode {
  UnnormalizedExplicit,
  TruncationOverflow,
  NumericalInstability,
  DegenerateMean,
  InvalidSample,
  InsufficientData,
  AllResamplesDegenerate,
  InvalidArgument,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code) noexcept;

// Usage-class errors (malformed or out-of-range input) versus domain errors
// raised while computing on valid input.
bool is_usage_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clickstat
