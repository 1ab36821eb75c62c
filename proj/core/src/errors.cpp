#include "locsdp/errors.hpp"

namespace locsdp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroGradient: return "ZeroGradient";
    case ErrorCode::kDegenerateShape: return "DegenerateShape";
    case ErrorCode::kEmptyShrunkPolytope: return "EmptyShrunkPolytope";
    case ErrorCode::kThinBody: return "ThinBody";
    case ErrorCode::kZeroDirection: return "ZeroDirection";
    case ErrorCode::kMissingMoment: return "MissingMoment";
    case ErrorCode::kEigenFailure: return "EigenFailure";
    case ErrorCode::kPsdViolation: return "PsdViolation";
    case ErrorCode::kZeroConditioning: return "ZeroConditioning";
    case ErrorCode::kNoDemand: return "NoDemand";
    case ErrorCode::kStageCapExceeded: return "StageCapExceeded";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
  }
  return "Unknown";
}

namespace {
std::string format(ErrorCode code, const std::string& what, int level) {
  std::string s = error_code_name(code);
  if (level >= 0) s += " (level " + std::to_string(level) + ")";
  s += ": ";
  s += what;
  return s;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what, int level)
    : std::runtime_error(format(code, what, level)),
      code_(code),
      level_(level),
      detail_(what) {}

Error Error::at_level(int level) const { return Error(code_, detail_, level); }

}  // namespace locsdp
