#pragma once

#include "confreg/constraints.hpp"
#include "confreg/lp.hpp"

#include <optional>
#include <vector>

namespace confreg {

struct EqualitySlice {
  Matrix H;
  Vector mu;
};

/// min ||K x - y||^2  s.t.  H x = mu (optional),  x in constraints (optional).
struct QpProblem {
  Matrix K;
  Vector y;
  std::optional<EqualitySlice> equality;
  std::optional<ConstraintSet> constraints;
};

enum class QpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(QpStatus s) noexcept;

enum class QpAlgorithm { ActiveSet, Admm };

struct QpSettings {
  QpAlgorithm algorithm = QpAlgorithm::ActiveSet;
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  int max_iter = 200000;
  // ADMM only
  double rho = 0.1;
  double sigma = 1e-6;
  double relaxation = 1.6;
  bool polish = true;
};

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  /// Indices into the constraint set's inequality rows that are active.
  std::vector<Eigen::Index> active_set;
  /// Multipliers for H x = mu (gradient of the optimum w.r.t. mu is -nu).
  Vector nu;
  /// Multipliers for the inequality rows (>= 0).
  Vector lambda;
  int iterations = 0;
};

/// Generic form used internally: E x = f, G x <= g.
struct LsqSystem {
  Matrix K;
  Vector y;
  Matrix E;
  Vector f;
  Matrix G;
  Vector g;
};

QpSolution solve_lsq(const LsqSystem& sys, const QpSettings& settings = {});
QpSolution solve_ls(const QpProblem& problem, const QpSettings& settings = {});

/// ||(I - P_K) y||^2 via the column projector.
double min_unconstrained(const Matrix& K, const Vector& y);

struct RecessionQuery {
  bool direction_found = false;
  Vector d;  // ||d||_inf = 1 when found
};

/// Search for d with K d = 0, d in rec(constraints), sign * h^T d > 0.
RecessionQuery recession_direction(const Matrix& K, const ConstraintSet& constraints,
                                   const Vector& h, int sign);

/// Recomputes stationarity / feasibility / complementarity for a candidate.
void kkt_residuals(const LsqSystem& sys, QpSolution& sol);

}  // namespace confreg
