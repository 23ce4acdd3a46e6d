#include "clickstat/errors.hpp"

namespace clickstat {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnnormalizedExplicit: return "UnnormalizedExplicit";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::DegenerateMean: return "DegenerateMean";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::AllResamplesDegenerate: return "AllResamplesDegenerate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

bool is_usage_error(ErrorCode code) noexcept {
  return code == ErrorCode::ParseError || code == ErrorCode::ValidationError ||
         code == ErrorCode::InvalidArgument;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace clickstat
