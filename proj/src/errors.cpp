#include "confreg/errors.hpp"

namespace confreg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RowSpaceViolation: return "RowSpaceViolation";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::InfeasibleBasePoint: return "InfeasibleBasePoint";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AtomError: return "AtomError";
    case ErrorCode::VertexBudgetExceeded: return "VertexBudgetExceeded";
    case ErrorCode::UnsupportedStatistic: return "UnsupportedStatistic";
    case ErrorCode::UnsupportedConstraint: return "UnsupportedConstraint";
    case ErrorCode::DegenerateCone: return "DegenerateCone";
    case ErrorCode::BracketError: return "BracketError";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NotTwoDimensional: return "NotTwoDimensional";
    case ErrorCode::InteriorPointOutside: return "InteriorPointOutside";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::SingularSigma: return "SingularSigma";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace confreg
