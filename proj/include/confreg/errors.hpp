#pragma once

#include <stdexcept>
#include <string>

namespace confreg {

/// Error categories shared by the C++ core and the C API status codes.
enum class ErrorCode : int {
  Ok = 0,
  DimensionMismatch = 1,
  RowSpaceViolation = 2,
  NotPositiveDefinite = 3,
  IterationLimit = 4,
  InfeasibleBasePoint = 5,
  DomainError = 6,
  AtomError = 7,
  VertexBudgetExceeded = 8,
  UnsupportedStatistic = 9,
  UnsupportedConstraint = 10,
  DegenerateCone = 11,
  BracketError = 12,
  EmptyRegion = 13,
  NotTwoDimensional = 14,
  InteriorPointOutside = 15,
  NotApplicable = 16,
  SingularSigma = 17,
  UnknownMethod = 18,
  InvalidConfig = 19,
  ParseError = 20,
  InfeasibleSpec = 21,
  Internal = 99,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace confreg
