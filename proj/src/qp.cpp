#include "confreg/qp.hpp"

#include "confreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace confreg {

const char* to_string(QpStatus s) noexcept {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

Matrix stack_rows(const Matrix& a, const Matrix& b, Eigen::Index cols) {
  Matrix out(a.rows() + b.rows(), cols);
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

// Indices of a maximal linearly independent subset of the rows of E.
std::vector<Eigen::Index> independent_rows(const Matrix& E) {
  std::vector<Eigen::Index> keep;
  if (E.rows() == 0) return keep;
  Eigen::ColPivHouseholderQR<Matrix> qr(E.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index r = qr.rank();
  for (Eigen::Index i = 0; i < r; ++i) keep.push_back(qr.colsPermutation().indices()[i]);
  std::sort(keep.begin(), keep.end());
  return keep;
}

// Minimizer of ||K(x + Z w) - y|| over w, returned as the step Z w.
Vector subspace_step(const Matrix& K, const Vector& y, const Matrix& C, const Vector& x) {
  const Eigen::Index p = x.size();
  const Matrix Z = C.rows() == 0 ? Matrix(Matrix::Identity(p, p)) : null_space(C);
  if (Z.cols() == 0) return Vector::Zero(p);
  const Matrix KZ = K * Z;
  const Vector w = pseudoinverse(KZ) * (y - K * x);
  return Z * w;
}

// Least-squares solution of C^T m = -grad.
Vector solve_multipliers(const Matrix& C, const Vector& grad) {
  if (C.rows() == 0) return Vector(0);
  return C.transpose().completeOrthogonalDecomposition().solve(-grad);
}

// Minimum-norm minimizer of ||Kx - y|| over {E x = f}.
Vector equality_ls(const Matrix& K, const Vector& y, const Matrix& E, const Vector& f) {
  const Eigen::Index p = K.cols();
  Vector x0 = Vector::Zero(p);
  if (E.rows() > 0) x0 = pseudoinverse(E) * f;
  return x0 + subspace_step(K, y, E, x0);
}

struct Reduced {
  Matrix E;
  Vector f;
  std::vector<Eigen::Index> rows;
};

Reduced reduce_equalities(const LsqSystem& s) {
  Reduced r;
  r.rows = independent_rows(s.E);
  r.E = select_rows(s.E, r.rows);
  r.f.resize(static_cast<Eigen::Index>(r.rows.size()));
  for (std::size_t i = 0; i < r.rows.size(); ++i) r.f[static_cast<Eigen::Index>(i)] = s.f[r.rows[i]];
  return r;
}

void fill_solution(const LsqSystem& s, const Reduced& red, const Vector& x,
                   const std::vector<Eigen::Index>& W, QpSolution& sol) {
  const Eigen::Index p = s.K.cols();
  sol.x = x;
  sol.objective = (s.K * x - s.y).squaredNorm();
  const Matrix C = stack_rows(red.E, select_rows(s.G, W), p);
  const Vector grad = 2.0 * s.K.transpose() * (s.K * x - s.y);
  const Vector m = solve_multipliers(C, grad);
  sol.nu = Vector::Zero(s.E.rows());
  for (std::size_t i = 0; i < red.rows.size(); ++i) sol.nu[red.rows[i]] = m[static_cast<Eigen::Index>(i)];
  sol.lambda = Vector::Zero(s.G.rows());
  const auto ne = static_cast<Eigen::Index>(red.rows.size());
  for (std::size_t i = 0; i < W.size(); ++i) sol.lambda[W[i]] = std::max(0.0, m[ne + static_cast<Eigen::Index>(i)]);
  sol.active_set = W;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  kkt_residuals(s, sol);
}

void check_dims(const LsqSystem& s) {
  const Eigen::Index p = s.K.cols();
  if (s.y.size() != s.K.rows()) throw Error(ErrorCode::DimensionMismatch, "qp: y size != rows of K");
  if (s.E.rows() != s.f.size() || (s.E.rows() > 0 && s.E.cols() != p))
    throw Error(ErrorCode::DimensionMismatch, "qp: equality block dimensions");
  if (s.G.rows() != s.g.size() || (s.G.rows() > 0 && s.G.cols() != p))
    throw Error(ErrorCode::DimensionMismatch, "qp: inequality block dimensions");
}

LsqSystem normalized(const LsqSystem& s) {
  LsqSystem out = s;
  const Eigen::Index p = s.K.cols();
  if (out.E.rows() == 0) out.E = Matrix(0, p);
  if (out.G.rows() == 0) out.G = Matrix(0, p);
  return out;
}

// Primal active-set method. Returns false when the phase-1 LP finds no
// feasible point.
QpSolution active_set(const LsqSystem& s, const QpSettings& settings) {
  const Eigen::Index p = s.K.cols();
  const Eigen::Index m = s.G.rows();
  const Reduced red = reduce_equalities(s);
  QpSolution sol;

  const double feas_tol = 1e-9 * (1.0 + std::max(inf_norm(s.g), inf_norm(s.f)));
  Vector x = equality_ls(s.K, s.y, red.E, red.f);
  const bool eq_ok =
      red.E.rows() == 0 || inf_norm(red.E * x - red.f) <= 1e-8 * (1.0 + inf_norm(red.f));
  if (eq_ok && (m == 0 || (s.G * x - s.g).maxCoeff() <= feas_tol)) {
    sol.status = QpStatus::Optimal;
    fill_solution(s, red, x, {}, sol);
    return sol;
  }
  if (m == 0) {
    sol.status = QpStatus::Infeasible;
    sol.primal_residual = inf_norm(red.E * x - red.f);
    return sol;
  }

  const FeasibilityResult fr = feasibility_lp(red.E, red.f, s.G, s.g);
  if (!fr.feasible) {
    sol.status = QpStatus::Infeasible;
    sol.primal_residual = fr.violation;
    return sol;
  }
  x = fr.witness;

  std::vector<Eigen::Index> W;
  std::vector<bool> inW(static_cast<std::size_t>(m), false);
  {
    Matrix C = red.E;
    std::size_t r = red.rows.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (s.g[i] - s.G.row(i).dot(x) > feas_tol) continue;
      Matrix trial = stack_rows(C, s.G.row(i), p);
      if (rank(trial) > r) {
        C = trial;
        ++r;
        W.push_back(i);
        inW[static_cast<std::size_t>(i)] = true;
      }
    }
  }

  const int bland_after = 50 * static_cast<int>(m + p) + 50;
  int it = 0;
  for (; it < settings.max_iter; ++it) {
    const Matrix C = stack_rows(red.E, select_rows(s.G, W), p);
    const Vector d = subspace_step(s.K, s.y, C, x);
    const double scale = 1.0 + inf_norm(x);
    if (inf_norm(d) <= 1e-12 * scale || (s.K * d).squaredNorm() <= 1e-20 * (1.0 + (s.K * x - s.y).squaredNorm())) {
      if (W.empty()) break;
      const Vector grad = 2.0 * s.K.transpose() * (s.K * x - s.y);
      const Vector mult = solve_multipliers(C, grad);
      const double dual_tol = 1e-9 * (1.0 + inf_norm(grad));
      const auto ne = red.E.rows();
      std::size_t drop = W.size();
      double most = -dual_tol;
      for (std::size_t j = 0; j < W.size(); ++j) {
        const double lam = mult[ne + static_cast<Eigen::Index>(j)];
        if (it >= bland_after) {
          if (lam < -dual_tol && (drop == W.size() || W[j] < W[drop])) drop = j;
        } else if (lam < most) {
          most = lam;
          drop = j;
        }
      }
      if (drop == W.size()) break;
      inW[static_cast<std::size_t>(W[drop])] = false;
      W.erase(W.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }
    double alpha = 1.0;
    Eigen::Index block = -1;
    const Vector Gd = s.G * d;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (inW[static_cast<std::size_t>(i)] || Gd[i] <= 1e-14 * scale) continue;
      const double slack = std::max(0.0, s.g[i] - s.G.row(i).dot(x));
      const double a = slack / Gd[i];
      if (a < alpha || (a == alpha && block >= 0 && i < block)) {
        alpha = a;
        block = i;
      }
    }
    x += alpha * d;
    if (block >= 0) {
      W.push_back(block);
      inW[static_cast<std::size_t>(block)] = true;
    }
  }
  sol.status = it >= settings.max_iter ? QpStatus::IterationLimit : QpStatus::Optimal;
  fill_solution(s, red, x, W, sol);
  sol.iterations = it;
  return sol;
}

Vector project_box(const Vector& v, const Vector& l, const Vector& u) { return v.cwiseMax(l).cwiseMin(u); }

QpSolution admm(const LsqSystem& s, const QpSettings& settings) {
  const Eigen::Index p = s.K.cols();
  const Eigen::Index me = s.E.rows();
  const Eigen::Index mi = s.G.rows();
  const Reduced red = reduce_equalities(s);
  QpSolution sol;
  if (me + mi > 0) {
    const FeasibilityResult fr = feasibility_lp(red.E, red.f, s.G, s.g);
    if (!fr.feasible) {
      sol.status = QpStatus::Infeasible;
      sol.primal_residual = fr.violation;
      return sol;
    }
  }
  const Matrix P = 2.0 * s.K.transpose() * s.K;
  const Vector q = -2.0 * s.K.transpose() * s.y;
  const Matrix A = stack_rows(s.E, s.G, p);
  const Eigen::Index m = A.rows();
  Vector l(m), u(m);
  l.head(me) = s.f;
  u.head(me) = s.f;
  l.tail(mi).setConstant(-kInf);
  u.tail(mi) = s.g;

  double rho = settings.rho;
  auto rho_vec = [&](double r) {
    Vector v(m);
    v.head(me).setConstant(1e3 * r);
    v.tail(mi).setConstant(r);
    return v;
  };
  Vector rv = rho_vec(rho);
  const double sig = settings.sigma;
  auto factor = [&](const Vector& rvec) {
    Matrix KKT = P + sig * Matrix::Identity(p, p);
    if (m > 0) KKT += A.transpose() * rvec.asDiagonal() * A;
    return Eigen::LDLT<Matrix>(KKT);
  };
  Eigen::LDLT<Matrix> ldlt = factor(rv);

  Vector x = Vector::Zero(p), z = project_box(A * x, l, u), yd = Vector::Zero(m);
  const double a = settings.relaxation;
  int it = 0;
  bool converged = false;
  for (; it < settings.max_iter; ++it) {
    const Vector rhs = sig * x - q + (m > 0 ? Vector(A.transpose() * (rv.cwiseProduct(z) - yd)) : Vector::Zero(p));
    const Vector xt = ldlt.solve(rhs);
    const Vector zt = A * xt;
    const Vector xn = a * xt + (1 - a) * x;
    const Vector zr = a * zt + (1 - a) * z;
    const Vector zn = project_box(zr + yd.cwiseQuotient(rv), l, u);
    yd += rv.cwiseProduct(zr - zn);
    x = xn;
    z = zn;
    if (it % 10 != 0) continue;
    const Vector Ax = A * x;
    const Vector Px = P * x;
    const Vector Aty = m > 0 ? Vector(A.transpose() * yd) : Vector::Zero(p);
    const double rp = inf_norm(Ax - z);
    const double rd = inf_norm(Px + q + Aty);
    const double ep = settings.eps_abs + settings.eps_rel * std::max(inf_norm(Ax), inf_norm(z));
    const double ed = settings.eps_abs + settings.eps_rel * std::max({inf_norm(Px), inf_norm(Aty), inf_norm(q)});
    if (rp <= ep && rd <= ed) {
      converged = true;
      break;
    }
    if (it % 100 == 0 && it > 0 && m > 0) {
      const double np = rp / std::max(1e-30, std::max(inf_norm(Ax), inf_norm(z)));
      const double nd = rd / std::max(1e-30, std::max({inf_norm(Px), inf_norm(Aty), inf_norm(q)}));
      double nr = rho * std::sqrt(np / std::max(nd, 1e-30));
      nr = std::clamp(nr, 1e-6, 1e6);
      if (nr > 5 * rho || nr < rho / 5) {
        rho = nr;
        rv = rho_vec(rho);
        ldlt = factor(rv);
      }
    }
  }
  sol.iterations = it;

  std::vector<Eigen::Index> W;
  for (Eigen::Index i = 0; i < mi; ++i) {
    if (yd[me + i] > 1e-9 || s.g[i] - s.G.row(i).dot(x) < 1e-7 * (1.0 + std::abs(s.g[i]))) W.push_back(i);
  }
  if (settings.polish) {
    // Solve with the detected active rows as equalities; keep the result only
    // if it is primal and dual feasible.
    std::vector<Eigen::Index> Wi;
    Matrix C = red.E;
    for (Eigen::Index i : W) {
      Matrix trial = stack_rows(C, s.G.row(i), p);
      if (rank(trial) > static_cast<std::size_t>(C.rows())) {
        C = trial;
        Wi.push_back(i);
      }
    }
    Vector fc(C.rows());
    fc.head(red.f.size()) = red.f;
    for (std::size_t j = 0; j < Wi.size(); ++j) fc[red.f.size() + static_cast<Eigen::Index>(j)] = s.g[Wi[j]];
    const Vector xp = equality_ls(s.K, s.y, C, fc);
    QpSolution trial;
    trial.status = QpStatus::Optimal;
    fill_solution(s, red, xp, Wi, trial);
    const Vector grad = 2.0 * s.K.transpose() * (s.K * xp - s.y);
    const Vector mult = solve_multipliers(C, grad);
    bool dual_ok = true;
    for (std::size_t j = 0; j < Wi.size(); ++j) {
      if (mult[red.E.rows() + static_cast<Eigen::Index>(j)] < -1e-7 * (1.0 + inf_norm(grad))) dual_ok = false;
    }
    if (dual_ok && trial.primal_residual <= 1e-8 * (1.0 + inf_norm(s.g) + inf_norm(s.f)) &&
        trial.dual_residual <= 1e-6 * (1.0 + inf_norm(grad) + inf_norm(q))) {
      trial.iterations = it;
      return trial;
    }
  }
  sol.status = converged ? QpStatus::Optimal : QpStatus::IterationLimit;
  sol.x = x;
  sol.objective = (s.K * x - s.y).squaredNorm();
  sol.nu = yd.head(me);
  sol.lambda = yd.tail(mi).cwiseMax(0.0);
  sol.active_set = W;
  kkt_residuals(s, sol);
  return sol;
}

}  // namespace

void kkt_residuals(const LsqSystem& sys, QpSolution& sol) {
  const LsqSystem s = normalized(sys);
  const Vector& x = sol.x;
  double prim = 0.0;
  if (s.E.rows() > 0) prim = std::max(prim, inf_norm(s.E * x - s.f));
  Vector slack;
  if (s.G.rows() > 0) {
    slack = s.g - s.G * x;
    prim = std::max(prim, std::max(0.0, -slack.minCoeff()));
  }
  sol.primal_residual = prim;
  Vector r = 2.0 * s.K.transpose() * (s.K * x - s.y);
  if (s.E.rows() > 0 && sol.nu.size() == s.E.rows()) r += s.E.transpose() * sol.nu;
  if (s.G.rows() > 0 && sol.lambda.size() == s.G.rows()) r += s.G.transpose() * sol.lambda;
  sol.dual_residual = inf_norm(r);
  sol.complementarity = 0.0;
  if (s.G.rows() > 0 && sol.lambda.size() == s.G.rows())
    sol.complementarity = inf_norm(sol.lambda.cwiseProduct(slack));
}

QpSolution solve_lsq(const LsqSystem& sys, const QpSettings& settings) {
  check_dims(sys);
  const LsqSystem s = normalized(sys);
  if (!all_finite(s.K) || !all_finite(s.y) || !all_finite(s.E) || !all_finite(s.f) || !all_finite(s.G) ||
      !all_finite(s.g))
    throw Error(ErrorCode::DomainError, "qp: non-finite input");
  return settings.algorithm == QpAlgorithm::Admm ? admm(s, settings) : active_set(s, settings);
}

QpSolution solve_ls(const QpProblem& problem, const QpSettings& settings) {
  const Eigen::Index p = problem.K.cols();
  LsqSystem s;
  s.K = problem.K;
  s.y = problem.y;
  s.E = Matrix(0, p);
  s.f = Vector(0);
  s.G = Matrix(0, p);
  s.g = Vector(0);
  if (problem.equality) {
    if (problem.equality->H.cols() != p || problem.equality->H.rows() != problem.equality->mu.size())
      throw Error(ErrorCode::DimensionMismatch, "qp: equality slice dimensions");
    s.E = problem.equality->H;
    s.f = problem.equality->mu;
  }
  if (problem.constraints) {
    if (problem.constraints->dim() != p) throw Error(ErrorCode::DimensionMismatch, "qp: constraint dimension");
    const Inequalities in = problem.constraints->inequalities();
    s.G = in.G;
    s.g = in.g;
  }
  return solve_lsq(s, settings);
}

double min_unconstrained(const Matrix& K, const Vector& y) {
  if (y.size() != K.rows()) throw Error(ErrorCode::DimensionMismatch, "min_unconstrained: y size");
  if (K.cols() == 0) return y.squaredNorm();
  const Matrix P = column_projector(K);
  return (y - P * y).squaredNorm();
}

RecessionQuery recession_direction(const Matrix& K, const ConstraintSet& constraints, const Vector& h,
                                   int sign) {
  const Eigen::Index p = K.cols();
  if (h.size() != p || constraints.dim() != p)
    throw Error(ErrorCode::DimensionMismatch, "recession_direction: dimensions");
  LinearProgram lp;
  lp.cost = -(sign >= 0 ? 1.0 : -1.0) * h;
  lp.A_eq = K;
  lp.b_eq = Vector::Zero(K.rows());
  lp.A_ub = constraints.recession_rows();
  if (lp.A_ub.rows() == 0) lp.A_ub = Matrix(0, p);
  lp.b_ub = Vector::Zero(lp.A_ub.rows());
  lp.lower = Vector::Constant(p, -1.0);
  lp.upper = Vector::Constant(p, 1.0);
  const LpResult res = solve_lp(lp);
  RecessionQuery q;
  if (res.status != LpStatus::Optimal) return q;
  const double tol = 1e-9 * std::max(1.0, inf_norm(h));
  if (-res.objective > tol && inf_norm(res.x) > 0) {
    q.direction_found = true;
    q.d = res.x / inf_norm(res.x);
  }
  return q;
}

}  // namespace confreg
