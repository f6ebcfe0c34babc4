#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace confreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin wrapper over a full SVD with the rank cutoff baked in.
///
/// Singular values below `rank_tolerance` are treated as zero everywhere in
/// the library (pseudoinverse, projectors, null spaces).
struct SvdFactors {
  Matrix U;                // rows x rows, orthonormal
  Vector singular_values;  // non-increasing
  Matrix Vt;               // cols x cols, orthonormal
  double rank_tolerance = 0.0;

  std::size_t rank() const;
  Matrix reconstruct(std::size_t rows, std::size_t cols) const;
};

/// max(rows, cols) * machine epsilon * sigma_max.
double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max);

SvdFactors svd(const Matrix& m);
std::size_t rank(const Matrix& m);

/// Moore-Penrose pseudoinverse. Zero matrix maps to the zero matrix.
Matrix pseudoinverse(const Matrix& m);

/// Orthonormal basis (as columns) of ker(m); p x (p - rank).
Matrix null_space(const Matrix& m);

/// Orthonormal basis (as columns) of range(m).
Matrix range_basis(const Matrix& m);

/// Orthogonal projector onto range(m).
Matrix column_projector(const Matrix& m);

/// ||h - h K^+ K||_2 <= 1e-8 * max(1, ||h||_2).
bool in_row_space(const Matrix& K, const Vector& h);

/// B = K (K^T K)^+ H^T so that B^T K = H. Throws RowSpaceViolation when a
/// row of H leaves row(K).
Matrix b_matrix(const Matrix& K, const Matrix& H);

struct SplitMatrices {
  Matrix projector_M;     // K^+ K
  Matrix H_parallel;      // H M
  Matrix H_perp;          // H (I - M)
  Matrix Sigma_parallel;  // H K^+ (K^+)^T H^T
};

SplitMatrices row_null_split(const Matrix& K, const Matrix& H);

struct Whitened {
  Matrix K;
  Vector y;
};

/// Maps (K, y) with noise covariance C to (L^{-1} K, L^{-1} y), C = L L^T.
/// Throws NotPositiveDefinite when the Cholesky factorization fails.
Whitened whiten(const Matrix& K, const Vector& y, const Matrix& noise_cov);

/// Whitening factor for a PSD matrix that may be singular: W (r x m) with
/// W S W^T = I_r and r = numerical rank of S. Eigenvalues below
/// rel_tol * trace(S) are dropped.
struct PsdFactor {
  Matrix W;            // r x m
  Matrix sqrt_factor;  // m x r, S = sqrt_factor * sqrt_factor^T
  std::size_t rank = 0;
  bool singular = false;
};

PsdFactor psd_whitening(const Matrix& S, double rel_tol = 1e-12);

/// Build a dense matrix from row-major data; throws DimensionMismatch.
Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data);
std::vector<double> to_row_major(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace confreg
