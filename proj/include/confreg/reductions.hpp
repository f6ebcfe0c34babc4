#pragma once

#include "confreg/calibration.hpp"
#include "confreg/regions.hpp"

#include <optional>
#include <vector>

namespace confreg {

struct TfmRowReport {
  bool applicable = false;
  /// h = h1 - h2 with h1, h2 >= 0 in row(K); empty when not applicable.
  Vector h1, h2;
  bool sign_parts = false;  // h1, h2 are the positive and negative parts
};

/// Split check per row of H: positive/negative parts when they lie in
/// row(K), otherwise the feasibility LP over (v1, v2).
std::vector<TfmRowReport> tfm_applicable(const Matrix& K, const Matrix& H);

struct TfmSplit {
  Vector h1, h2;
};

struct TfmReduced {
  Matrix expanded;     // m x p, rows h^(i)
  Matrix Sigma;        // m x m
  Matrix tilde_H;      // k x m, row i recovers functional i
  Matrix y_map;        // m x n, y_tilde = y_map * y
  std::vector<int> row_of;  // functional each expanded row belongs to
  int k1 = 0;          // number of sign-split functionals
  PsdFactor whitening;  // of Sigma
  /// Whitened problem: K = W, H = tilde_H, x >= 0. Observed data W * y_tilde.
  ProblemSpec spec;
  bool singular_sigma = false;

  Vector reduce_y(const Vector& y) const { return whitening.W * (y_map * y); }
  /// x_tilde for a known x (used for checks).
  Vector reduce_x(const Vector& x) const { return expanded * x; }
};

/// split_choices, when given, overrides the default split of every row.
TfmReduced tfm_reduce(const Matrix& K, const Matrix& H,
                      const std::optional<std::vector<TfmSplit>>& split_choices = std::nullopt);

enum class TfmMode {
  Improved,  // lambda1 with the quantile at the reduced origin
  Original,  // lambda2c with the chi-square constant of the reduced dimension
};

struct TfmSolution {
  RegionSpec region;  // reduced region, mu in R^k
  IntervalK box;
  ThresholdRule threshold;
};

TfmSolution tfm_calibrate_and_solve(const TfmReduced& reduced, const Vector& y, double alpha, TfmMode mode,
                                    const CalibrationOptions& opts = {});

struct BoxNormalized {
  Vector scale;  // T = diag(scale)
  Vector shift;  // delta, z = T x + delta
  Matrix K_prime;
  Vector y_shift;  // y' = y + y_shift
  std::vector<int> A, B, U;
  ConstraintSet constraints;  // on z

  Vector to_z(const Vector& x) const { return scale.cwiseProduct(x) + shift; }
  Vector to_x(const Vector& z) const { return (z - shift).cwiseQuotient(scale); }
  /// h^T x = h_z^T z + functional_offset(h)
  Vector h_z(const Vector& h) const { return h.cwiseQuotient(scale); }
  double functional_offset(const Vector& h) const { return -h_z(h).dot(shift); }
};

BoxNormalized box_normalize(const Matrix& K, const Vector& lo, const Vector& up);

struct BoxReduced {
  Vector h_plus, h_minus;  // in z coordinates
  double M_plus_A = 0.0;
  double M_minus_A = 0.0;
  Matrix Sigma;    // 2 x 2
  Matrix y_map;    // 2 x n on y'
  Matrix tilde_K;  // 2 x 6
  Vector tilde_h;  // 6
  PsdFactor whitening;
  ProblemSpec spec;  // K = W tilde_K, H = tilde_h^T, six-variable box
  std::vector<Vector> candidates;
  bool singular_sigma = false;

  Vector reduce_y(const Vector& y_prime) const { return whitening.W * (y_map * y_prime); }
};

/// k = 1 six-variable reduction on normalized coordinates; h is given in z
/// coordinates.
BoxReduced box_reduce_k1(const BoxNormalized& norm, const Vector& h_z);

struct BoxSolution {
  Interval interval;  // for h^T x in the original coordinates
  ThresholdRule threshold;
};

/// Max quantile over the candidate points, then the profile interval.
BoxSolution box_calibrate_and_solve(const Matrix& K, const Vector& lo, const Vector& up, const Vector& h,
                                    const Vector& y, double alpha, const CalibrationOptions& opts = {});

}  // namespace confreg
