#include "levsample/error.hpp"

namespace levsample {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateScheme: return "DegenerateScheme";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidFloor: return "InvalidFloor";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::SingularSubsample: return "SingularSubsample";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateScheme:
    case ErrorCode::SingularSubsample:
    case ErrorCode::ZeroProbability:
    case ErrorCode::NumericalFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace levsample
