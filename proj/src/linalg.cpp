#include "confreg/linalg.hpp"

#include "confreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace confreg {

std::size_t SvdFactors::rank() const {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values[i] > rank_tolerance) ++r;
  }
  return r;
}

Matrix SvdFactors::reconstruct(std::size_t rows, std::size_t cols) const {
  Matrix S = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) S(i, i) = singular_values[i];
  return U * S * Vt;
}

double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         sigma_max;
}

SvdFactors svd(const Matrix& m) {
  SvdFactors out;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows == 0 || cols == 0) {
    out.U = Matrix::Identity(rows, rows);
    out.Vt = Matrix::Identity(cols, cols);
    out.singular_values = Vector::Zero(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = dec.matrixU();
  out.Vt = dec.matrixV().transpose();
  out.singular_values = dec.singularValues();
  const double smax = out.singular_values.size() > 0 ? out.singular_values[0] : 0.0;
  out.rank_tolerance = default_rank_tolerance(rows, cols, smax);
  return out;
}

std::size_t rank(const Matrix& m) { return svd(m).rank(); }

Matrix pseudoinverse(const Matrix& m) {
  const SvdFactors f = svd(m);
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  const auto r = static_cast<Eigen::Index>(f.rank());
  for (Eigen::Index i = 0; i < r; ++i) {
    out.noalias() += (f.Vt.row(i).transpose() / f.singular_values[i]) * f.U.col(i).transpose();
  }
  return out;
}

Matrix null_space(const Matrix& m) {
  const Eigen::Index p = m.cols();
  if (m.rows() == 0) return Matrix::Identity(p, p);
  const SvdFactors f = svd(m);
  const auto r = static_cast<Eigen::Index>(f.rank());
  return f.Vt.bottomRows(p - r).transpose();
}

Matrix range_basis(const Matrix& m) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix::Zero(m.rows(), 0);
  const SvdFactors f = svd(m);
  return f.U.leftCols(static_cast<Eigen::Index>(f.rank()));
}

Matrix column_projector(const Matrix& m) {
  const Matrix Q = range_basis(m);
  return Q * Q.transpose();
}

bool in_row_space(const Matrix& K, const Vector& h) {
  const Matrix M = pseudoinverse(K) * K;
  const Vector residual = h - M.transpose() * h;
  return residual.norm() <= 1e-8 * std::max(1.0, h.norm());
}

Matrix b_matrix(const Matrix& K, const Matrix& H) {
  if (K.cols() != H.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "b_matrix: K and H column counts differ");
  }
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    if (!in_row_space(K, H.row(i).transpose())) {
      throw Error(ErrorCode::RowSpaceViolation,
                  "row " + std::to_string(i) + " of H is not in the row space of K");
    }
  }
  const Matrix KtK = K.transpose() * K;
  return K * pseudoinverse(KtK) * H.transpose();
}

SplitMatrices row_null_split(const Matrix& K, const Matrix& H) {
  if (K.cols() != H.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "row_null_split: K and H column counts differ");
  }
  const Matrix Kp = pseudoinverse(K);
  SplitMatrices out;
  out.projector_M = Kp * K;
  // Symmetrize: M is an orthogonal projector, round-off only breaks symmetry.
  out.projector_M = 0.5 * (out.projector_M + out.projector_M.transpose()).eval();
  out.H_parallel = H * out.projector_M;
  out.H_perp = H - out.H_parallel;
  const Matrix HKp = H * Kp;
  out.Sigma_parallel = HKp * HKp.transpose();
  return out;
}

Whitened whiten(const Matrix& K, const Vector& y, const Matrix& noise_cov) {
  if (noise_cov.rows() != noise_cov.cols() || noise_cov.rows() != K.rows() ||
      y.size() != K.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "whiten: inconsistent dimensions");
  }
  if ((noise_cov - noise_cov.transpose()).norm() > 1e-12 * std::max(1.0, noise_cov.norm())) {
    throw Error(ErrorCode::NotPositiveDefinite, "whiten: covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(noise_cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "whiten: Cholesky factorization failed");
  }
  Whitened out;
  out.K = llt.matrixL().solve(K);
  out.y = llt.matrixL().solve(y);
  return out;
}

PsdFactor psd_whitening(const Matrix& S, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  const Vector& ev = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  const double trace = std::max(ev.cwiseMax(0.0).sum(), 0.0);
  const double cutoff = rel_tol * std::max(trace, std::numeric_limits<double>::min());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
    if (ev[i] > cutoff) keep.push_back(i);
  }
  PsdFactor out;
  out.rank = keep.size();
  out.singular = out.rank < static_cast<std::size_t>(S.rows());
  out.W.resize(static_cast<Eigen::Index>(keep.size()), S.rows());
  out.sqrt_factor.resize(S.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const auto idx = keep[j];
    const double s = std::sqrt(ev[idx]);
    out.W.row(static_cast<Eigen::Index>(j)) = V.col(idx).transpose() / s;
    out.sqrt_factor.col(static_cast<Eigen::Index>(j)) = V.col(idx) * s;
  }
  return out;
}

Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data) {
  if (data.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix data has " + std::to_string(data.size()) + " entries, expected " +
                    std::to_string(rows * cols));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
  return m;
}

std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace confreg
