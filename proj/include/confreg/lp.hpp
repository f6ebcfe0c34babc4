#pragma once

#include "confreg/linalg.hpp"

namespace confreg {

/// min cost^T x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
///
/// Bounds may be infinite. Empty matrices (0 rows) are allowed for either
/// block. When `lower`/`upper` are left empty, every variable is free.
struct LinearProgram {
  Vector cost;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector lower;
  Vector upper;

  Eigen::Index num_vars() const { return cost.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSettings {
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-10;
  /// Phase-1 total violation above which the system is declared empty.
  double infeasibility_tol = 1e-7;
  int max_iterations = 0;  // 0: 50 * (rows + cols)
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  /// Optimal phase-1 objective (sum of artificial variables).
  double phase1_violation = 0.0;
  int iterations = 0;
};

/// Dense two-phase tableau simplex with Bland's rule. Intended for the small
/// systems the rest of the library produces (tens of variables).
LpResult solve_lp(const LinearProgram& lp, const LpSettings& settings = {});

struct FeasibilityResult {
  bool feasible = false;
  Vector witness;
  double violation = 0.0;  // phase-1 optimum
};

/// Find x (free) with A_eq x = b_eq and A_ub x <= b_ub.
FeasibilityResult feasibility_lp(const Matrix& A_eq, const Vector& b_eq, const Matrix& A_ub,
                                 const Vector& b_ub, const LpSettings& settings = {});

/// Maximum constraint violation of x for the system above.
double max_violation(const Matrix& A_eq, const Vector& b_eq, const Matrix& A_ub,
                     const Vector& b_ub, const Vector& x);

}  // namespace confreg
