#pragma once

#include <stdexcept>
#include <string>

namespace locsdp {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kZeroGradient,
  kDegenerateShape,
  kEmptyShrunkPolytope,
  kThinBody,
  kZeroDirection,
  kMissingMoment,
  kEigenFailure,
  kPsdViolation,
  kZeroConditioning,
  kNoDemand,
  kStageCapExceeded,
  kParse,
  kSelfLoop,
  kTooLarge,
  kBudgetExhausted,
};

const char* error_code_name(ErrorCode code);

// Every module reports failures through this type. `level` is the solver
// recursion depth at which the failure surfaced, or -1 outside the solver.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int level = -1);

  ErrorCode code() const { return code_; }
  int level() const { return level_; }

  // Copy of this error with the recursion level attached.
  Error at_level(int level) const;

 private:
  ErrorCode code_;
  int level_;
  std::string detail_;
};

}  // namespace locsdp
