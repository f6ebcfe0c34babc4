#include "confreg/lp.hpp"

#include "confreg/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace confreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x = offset + S z, z >= 0. Each original variable maps to one or two columns.
struct VariableMap {
  Vector offset;
  Matrix S;
  // Rows u_j <= width for doubly bounded variables.
  std::vector<std::pair<Eigen::Index, double>> upper_rows;
};

VariableMap map_variables(const LinearProgram& lp) {
  const Eigen::Index n = lp.num_vars();
  const bool has_bounds = lp.lower.size() == n && lp.upper.size() == n;
  std::vector<std::pair<Eigen::Index, double>> cols;  // (var, sign)
  VariableMap vm;
  vm.offset = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = has_bounds ? lp.lower[j] : -kInf;
    const double up = has_bounds ? lp.upper[j] : kInf;
    if (std::isfinite(lo) && std::isfinite(up) && up < lo) {
      throw Error(ErrorCode::DimensionMismatch, "solve_lp: lower bound exceeds upper bound");
    }
    if (std::isfinite(lo)) {
      vm.offset[j] = lo;
      cols.emplace_back(j, 1.0);
      if (std::isfinite(up)) {
        vm.upper_rows.emplace_back(static_cast<Eigen::Index>(cols.size()) - 1, up - lo);
      }
    } else if (std::isfinite(up)) {
      vm.offset[j] = up;
      cols.emplace_back(j, -1.0);
    } else {
      cols.emplace_back(j, 1.0);
      cols.emplace_back(j, -1.0);
    }
  }
  vm.S = Matrix::Zero(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    vm.S(cols[c].first, static_cast<Eigen::Index>(c)) = cols[c].second;
  }
  return vm;
}

class Tableau {
 public:
  Tableau(const Matrix& M, const Vector& r, Eigen::Index num_structural)
      : rows_(M.rows()), structural_(num_structural) {
    const Eigen::Index cols = M.cols();
    T_ = Matrix::Zero(rows_ + 1, cols + rows_ + 1);
    T_.block(0, 0, rows_, cols) = M;
    for (Eigen::Index i = 0; i < rows_; ++i) T_(i, cols + i) = 1.0;
    T_.block(0, cols + rows_, rows_, 1) = r;
    real_cols_ = cols;
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = cols + i;
  }

  Eigen::Index rhs_col() const { return T_.cols() - 1; }
  bool is_artificial(Eigen::Index j) const { return j >= real_cols_ && j < real_cols_ + rows_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    T_.row(r) /= T_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f != 0.0) T_.row(i) -= f * T_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  void set_objective(const Vector& cost_full) {
    T_.row(rows_).setZero();
    T_.block(rows_, 0, 1, cost_full.size()) = cost_full.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double cb = basis_cost(cost_full, basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) T_.row(rows_) -= cb * T_.row(i);
    }
  }

  // Returns: 0 optimal, 1 unbounded, 2 iteration limit.
  int run(const LpSettings& s, bool allow_artificial, int& iterations, int max_iter) {
    while (true) {
      if (iterations >= max_iter) return 2;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs_col(); ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (T_(rows_, j) < -s.optimality_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return 0;
      Eigen::Index leave = -1;
      double best = kInf;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = T_(i, enter);
        if (a > s.pivot_tol) {
          const double ratio = T_(i, rhs_col()) / a;
          if (ratio < best - 1e-14 ||
              (ratio <= best + 1e-14 && leave >= 0 &&
               basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void drive_out_artificials(const LpSettings& s) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      for (Eigen::Index j = 0; j < real_cols_; ++j) {
        if (std::abs(T_(i, j)) > s.pivot_tol * 1e3) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -T_(rows_, rhs_col()); }

  Vector solution() const {
    Vector z = Vector::Zero(real_cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
      if (b < real_cols_) z[b] = T_(i, rhs_col());
    }
    return z;
  }

  Eigen::Index real_cols() const { return real_cols_; }
  Eigen::Index rows() const { return rows_; }

 private:
  double basis_cost(const Vector& cost_full, Eigen::Index b) const {
    return b < cost_full.size() ? cost_full[b] : 0.0;
  }

  Matrix T_;
  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index real_cols_ = 0;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpSettings& settings) {
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index me = lp.A_eq.rows();
  const Eigen::Index mi = lp.A_ub.rows();
  if ((me > 0 && lp.A_eq.cols() != n) || (mi > 0 && lp.A_ub.cols() != n) ||
      lp.b_eq.size() != me || lp.b_ub.size() != mi) {
    throw Error(ErrorCode::DimensionMismatch, "solve_lp: inconsistent dimensions");
  }
  const VariableMap vm = map_variables(lp);
  const Eigen::Index nz = vm.S.cols();
  const auto nub = static_cast<Eigen::Index>(vm.upper_rows.size());
  const Eigen::Index num_slack = mi + nub;
  const Eigen::Index rows = me + mi + nub;
  const Eigen::Index cols = nz + num_slack;

  Matrix M = Matrix::Zero(rows, cols);
  Vector r(rows);
  if (me > 0) {
    M.block(0, 0, me, nz) = lp.A_eq * vm.S;
    r.head(me) = lp.b_eq - lp.A_eq * vm.offset;
  }
  if (mi > 0) {
    M.block(me, 0, mi, nz) = lp.A_ub * vm.S;
    M.block(me, nz, mi, mi).setIdentity();
    r.segment(me, mi) = lp.b_ub - lp.A_ub * vm.offset;
  }
  for (Eigen::Index k = 0; k < nub; ++k) {
    const auto [col, width] = vm.upper_rows[static_cast<std::size_t>(k)];
    M(me + mi + k, col) = 1.0;
    M(me + mi + k, nz + mi + k) = 1.0;
    r[me + mi + k] = width;
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (r[i] < 0) {
      M.row(i) *= -1.0;
      r[i] = -r[i];
    }
  }

  LpResult result;
  const int max_iter =
      settings.max_iterations > 0 ? settings.max_iterations : static_cast<int>(50 * (rows + cols) + 50);
  Tableau tab(M, r, nz);

  // Phase 1: minimize the sum of artificials.
  Vector phase1 = Vector::Zero(cols + rows);
  phase1.tail(rows).setOnes();
  tab.set_objective(phase1);
  int iterations = 0;
  const int p1 = tab.run(settings, true, iterations, max_iter);
  result.iterations = iterations;
  if (p1 == 2) {
    result.status = LpStatus::IterationLimit;
    return result;
  }
  result.phase1_violation = std::max(0.0, tab.objective_value());
  const double scale = std::max(1.0, r.size() > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0);
  if (result.phase1_violation > settings.infeasibility_tol * scale) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  tab.drive_out_artificials(settings);

  // Phase 2 on the original cost.
  Vector cost_full = Vector::Zero(cols + rows);
  if (n > 0) cost_full.head(nz) = vm.S.transpose() * lp.cost;
  tab.set_objective(cost_full);
  const int p2 = tab.run(settings, false, iterations, max_iter);
  result.iterations = iterations;
  const Vector z = tab.solution();
  result.x = vm.offset + vm.S * z.head(nz);
  result.objective = n > 0 ? lp.cost.dot(result.x) : 0.0;
  if (p2 == 1) {
    result.status = LpStatus::Unbounded;
  } else if (p2 == 2) {
    result.status = LpStatus::IterationLimit;
  } else {
    result.status = LpStatus::Optimal;
  }
  return result;
}

double max_violation(const Matrix& A_eq, const Vector& b_eq, const Matrix& A_ub,
                     const Vector& b_ub, const Vector& x) {
  double v = 0.0;
  if (A_eq.rows() > 0) v = std::max(v, (A_eq * x - b_eq).lpNorm<Eigen::Infinity>());
  if (A_ub.rows() > 0) v = std::max(v, (A_ub * x - b_ub).maxCoeff());
  return v;
}

FeasibilityResult feasibility_lp(const Matrix& A_eq, const Vector& b_eq, const Matrix& A_ub,
                                 const Vector& b_ub, const LpSettings& settings) {
  Eigen::Index n = std::max(A_eq.cols(), A_ub.cols());
  LinearProgram lp;
  lp.cost = Vector::Zero(n);
  lp.A_eq = A_eq.rows() > 0 ? A_eq : Matrix(0, n);
  lp.b_eq = b_eq;
  lp.A_ub = A_ub.rows() > 0 ? A_ub : Matrix(0, n);
  lp.b_ub = b_ub;
  const LpResult res = solve_lp(lp, settings);
  if (res.status == LpStatus::IterationLimit) {
    throw Error(ErrorCode::IterationLimit, "feasibility_lp: simplex iteration limit");
  }
  FeasibilityResult out;
  out.violation = res.phase1_violation;
  out.feasible = res.status != LpStatus::Infeasible;
  if (out.feasible) out.witness = res.x;
  return out;
}

}  // namespace confreg
