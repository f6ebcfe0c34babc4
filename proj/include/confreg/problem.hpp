#pragma once

#include "confreg/constraints.hpp"

#include <string>

namespace confreg {

enum class TestStatistic { Lambda1, Lambda2U, Lambda2C };

/// "l1", "l2u", "l2c".
const char* to_string(TestStatistic s) noexcept;
TestStatistic parse_statistic(const std::string& name);

/// y = K x* + eps, eps ~ N(0, I), x* in constraints; inference on H x*.
struct ProblemSpec {
  Matrix K;
  Matrix H;
  ConstraintSet constraints;

  Eigen::Index n() const { return K.rows(); }
  Eigen::Index p() const { return K.cols(); }
  Eigen::Index k() const { return H.rows(); }

  /// Dimension checks plus a feasibility LP on the constraint set.
  /// Throws DimensionMismatch / DomainError / InfeasibleSpec.
  void validate() const;

  /// A point of the constraint set (the LP witness).
  Vector feasible_point() const;
};

}  // namespace confreg
