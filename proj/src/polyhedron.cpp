#include "confreg/polyhedron.hpp"

#include "confreg/lp.hpp"

#include <algorithm>
#include <limits>

namespace confreg {

namespace {

Matrix stack(const Matrix& a, const Matrix& b, Eigen::Index cols) {
  Matrix out(a.rows() + b.rows(), cols);
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

// Advance a sorted combination of size d drawn from [0, m). False at the end.
bool next_combination(std::vector<Eigen::Index>& c, Eigen::Index m) {
  const auto d = static_cast<Eigen::Index>(c.size());
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (c[static_cast<std::size_t>(i)] < m - d + i) {
      ++c[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < d; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

VertexEnumeration enumerate_vertices(const Matrix& G, const Vector& g, std::size_t budget, double tol) {
  VertexEnumeration out;
  const Eigen::Index p = G.cols();
  const Eigen::Index m = G.rows();
  out.lineality = m == 0 ? Matrix(Matrix::Identity(p, p)) : null_space(G);
  const Matrix N = m == 0 ? Matrix(p, 0) : range_basis(G.transpose());
  const Eigen::Index d = N.cols();
  if (d == 0) {
    // Whole space (or only lineality): the origin stands in for every point.
    if (m == 0 || g.minCoeff() >= -tol) out.vertices.push_back(Vector::Zero(p));
    return out;
  }
  const Matrix GN = G * N;
  const double scale = 1.0 + g.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> comb(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) comb[static_cast<std::size_t>(i)] = i;
  do {
    if (out.bases_tried >= budget) {
      out.budget_exceeded = true;
      break;
    }
    ++out.bases_tried;
    Matrix A(d, d);
    Vector b(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      A.row(i) = GN.row(comb[static_cast<std::size_t>(i)]);
      b[i] = g[comb[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) continue;
    const Vector w = lu.solve(b);
    if ((GN * w - g).maxCoeff() > tol * scale) continue;
    const Vector x = N * w;
    const bool dup = std::any_of(out.vertices.begin(), out.vertices.end(), [&](const Vector& v) {
      return (v - x).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + x.lpNorm<Eigen::Infinity>());
    });
    if (!dup) out.vertices.push_back(x);
  } while (next_combination(comb, m));
  return out;
}

std::vector<Eigen::Index> implicit_equalities(const Matrix& E, const Matrix& G) {
  std::vector<Eigen::Index> out;
  const Eigen::Index p = std::max(E.cols(), G.cols());
  const Eigen::Index m = G.rows();
  if (m == 0) return out;
  const Matrix N = E.rows() == 0 ? Matrix(Matrix::Identity(p, p)) : null_space(E);
  const Eigen::Index d = N.cols();
  const Matrix GN = G * N;
  // Variables (w, t): maximize sum t s.t. GN w + t <= 0, 0 <= t <= 1, w free.
  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (GN.row(i).lpNorm<Eigen::Infinity>() <= 1e-12) {
      // identically zero on ker(E): G_i x = 0 there
      out.push_back(i);
    } else {
      live.push_back(i);
    }
  }
  if (live.empty()) return out;
  const auto ml = static_cast<Eigen::Index>(live.size());
  LinearProgram lp;
  lp.cost = Vector::Zero(d + ml);
  lp.cost.tail(ml).setConstant(-1.0);
  lp.A_eq = Matrix(0, d + ml);
  lp.b_eq = Vector(0);
  lp.A_ub = Matrix::Zero(ml, d + ml);
  for (Eigen::Index i = 0; i < ml; ++i) {
    lp.A_ub.block(i, 0, 1, d) = GN.row(live[static_cast<std::size_t>(i)]);
    lp.A_ub(i, d + i) = 1.0;
  }
  lp.b_ub = Vector::Zero(ml);
  lp.lower = Vector::Constant(d + ml, -std::numeric_limits<double>::infinity());
  lp.upper = Vector::Constant(d + ml, std::numeric_limits<double>::infinity());
  lp.lower.tail(ml).setZero();
  lp.upper.tail(ml).setOnes();
  const LpResult r = solve_lp(lp);
  for (Eigen::Index i = 0; i < ml; ++i) {
    if (r.status != LpStatus::Optimal || r.x[d + i] < 0.5) out.push_back(live[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t image_cone_dimension(const Matrix& K, const Matrix& E, const Matrix& G) {
  const Eigen::Index p = K.cols();
  const std::vector<Eigen::Index> imp = implicit_equalities(E.rows() ? E : Matrix(0, p), G.rows() ? G : Matrix(0, p));
  Matrix Gi(static_cast<Eigen::Index>(imp.size()), p);
  for (std::size_t i = 0; i < imp.size(); ++i) Gi.row(static_cast<Eigen::Index>(i)) = G.row(imp[i]);
  const Matrix C = stack(E.rows() ? E : Matrix(0, p), Gi, p);
  const Matrix N = C.rows() == 0 ? Matrix(Matrix::Identity(p, p)) : null_space(C);
  if (N.cols() == 0) return 0;
  return rank(K * N);
}

}  // namespace confreg
