#include "confreg/reductions.hpp"

#include "confreg/errors.hpp"
#include "confreg/lp.hpp"

#include <algorithm>
#include <cmath>

namespace confreg {

namespace {

double scale_of(const Vector& h) { return std::max(1.0, h.lpNorm<Eigen::Infinity>()); }

void clip_small(Vector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] < 0.0 && v[i] > -tol) v[i] = 0.0;
}

bool is_zero(const Vector& v, double tol) { return v.size() == 0 || v.lpNorm<Eigen::Infinity>() <= tol; }

}  // namespace

std::vector<TfmRowReport> tfm_applicable(const Matrix& K, const Matrix& H) {
  if (K.cols() != H.cols()) throw Error(ErrorCode::DimensionMismatch, "tfm: K and H column counts differ");
  const Eigen::Index n = K.rows();
  const Eigen::Index p = K.cols();
  std::vector<TfmRowReport> out;
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    const Vector h = H.row(r).transpose();
    TfmRowReport rep;
    const Vector hp = h.cwiseMax(0.0);
    const Vector hm = (-h).cwiseMax(0.0);
    if (in_row_space(K, hp) && in_row_space(K, hm)) {
      rep.applicable = true;
      rep.sign_parts = true;
      rep.h1 = hp;
      rep.h2 = hm;
      out.push_back(rep);
      continue;
    }
    // find v1, v2: K^T (v1 - v2) = h, K^T v1 >= 0, K^T v2 >= 0
    Matrix Aeq(p, 2 * n);
    Aeq << K.transpose(), -K.transpose();
    Matrix Aub = Matrix::Zero(2 * p, 2 * n);
    Aub.topLeftCorner(p, n) = -K.transpose();
    Aub.bottomRightCorner(p, n) = -K.transpose();
    const FeasibilityResult f = feasibility_lp(Aeq, h, Aub, Vector::Zero(2 * p));
    if (f.feasible) {
      rep.applicable = true;
      rep.h1 = K.transpose() * f.witness.head(n);
      rep.h2 = K.transpose() * f.witness.tail(n);
      const double tol = 1e-9 * scale_of(h);
      clip_small(rep.h1, tol);
      clip_small(rep.h2, tol);
    }
    out.push_back(rep);
  }
  return out;
}

TfmReduced tfm_reduce(const Matrix& K, const Matrix& H, const std::optional<std::vector<TfmSplit>>& split_choices) {
  if (K.cols() != H.cols()) throw Error(ErrorCode::DimensionMismatch, "tfm: K and H column counts differ");
  if (!all_finite(K) || !all_finite(H)) throw Error(ErrorCode::DomainError, "tfm: non-finite input");
  const Eigen::Index k = H.rows();
  const Eigen::Index p = K.cols();
  std::vector<TfmSplit> splits;
  if (split_choices) {
    if (static_cast<Eigen::Index>(split_choices->size()) != k)
      throw Error(ErrorCode::DimensionMismatch, "tfm: need one split per row of H");
    for (Eigen::Index r = 0; r < k; ++r) {
      const TfmSplit& s = (*split_choices)[static_cast<std::size_t>(r)];
      if (s.h1.size() != p || s.h2.size() != p) throw Error(ErrorCode::DimensionMismatch, "tfm: split has wrong size");
      const Vector h = H.row(r).transpose();
      const double tol = 1e-9 * scale_of(h);
      if (s.h1.minCoeff() < -tol || s.h2.minCoeff() < -tol || (s.h1 - s.h2 - h).lpNorm<Eigen::Infinity>() > tol ||
          !in_row_space(K, s.h1) || !in_row_space(K, s.h2))
        throw Error(ErrorCode::NotApplicable, "tfm: split choice for row " + std::to_string(r) + " is not valid");
      splits.push_back(s);
    }
  } else {
    const auto reps = tfm_applicable(K, H);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (!reps[r].applicable)
        throw Error(ErrorCode::NotApplicable,
                    "tfm: row " + std::to_string(r) + " cannot be split into non-negative parts in row(K)");
      splits.push_back({reps[r].h1, reps[r].h2});
    }
  }

  struct Item {
    Vector v;
    int row;
    double sign;
  };
  std::vector<Item> pairs, singles;
  int k1 = 0;
  for (Eigen::Index r = 0; r < k; ++r) {
    const TfmSplit& s = splits[static_cast<std::size_t>(r)];
    const double tol = 1e-12 * scale_of(H.row(r).transpose());
    const bool z1 = is_zero(s.h1, tol), z2 = is_zero(s.h2, tol);
    if (!z1 && !z2) {
      pairs.push_back({s.h1, static_cast<int>(r), 1.0});
      pairs.push_back({s.h2, static_cast<int>(r), -1.0});
      ++k1;
    } else if (z2) {
      singles.push_back({s.h1, static_cast<int>(r), 1.0});
    } else {
      singles.push_back({s.h2, static_cast<int>(r), -1.0});
    }
  }
  std::vector<Item> items = pairs;
  items.insert(items.end(), singles.begin(), singles.end());
  const Eigen::Index m = static_cast<Eigen::Index>(items.size());

  TfmReduced out;
  out.k1 = k1;
  out.expanded = Matrix(m, p);
  out.tilde_H = Matrix::Zero(k, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Item& it = items[static_cast<std::size_t>(i)];
    out.expanded.row(i) = it.v.transpose();
    out.tilde_H(it.row, i) = it.sign;
    out.row_of.push_back(it.row);
  }
  const Matrix Kp = pseudoinverse(K);
  out.y_map = out.expanded * Kp;
  out.Sigma = out.y_map * out.y_map.transpose();
  out.Sigma = 0.5 * (out.Sigma + out.Sigma.transpose());
  out.whitening = psd_whitening(out.Sigma);
  out.singular_sigma = out.whitening.singular;
  out.spec.K = out.whitening.W;
  out.spec.H = out.tilde_H;
  out.spec.constraints = ConstraintSet::nonnegative(static_cast<std::size_t>(m));
  return out;
}

TfmSolution tfm_calibrate_and_solve(const TfmReduced& reduced, const Vector& y, double alpha, TfmMode mode,
                                    const CalibrationOptions& opts) {
  if (y.size() != reduced.y_map.cols()) throw Error(ErrorCode::DimensionMismatch, "tfm: y has wrong size");
  TfmSolution out;
  out.region.spec = reduced.spec;
  out.region.y = reduced.reduce_y(y);
  if (mode == TfmMode::Original) {
    out.region.stat = TestStatistic::Lambda2C;
    out.threshold = global_threshold(reduced.spec, TestStatistic::Lambda2C, alpha, ThresholdMethod::ChiSqN, opts);
  } else {
    out.region.stat = TestStatistic::Lambda1;
    // with no sign-split rows the origin statistic is exactly chi-square
    out.threshold = global_threshold(reduced.spec, TestStatistic::Lambda1, alpha,
                                     reduced.k1 == 0 ? ThresholdMethod::ChiSqN : ThresholdMethod::Origin, opts);
  }
  out.region.threshold = out.threshold;
  out.box = bounding_box(out.region);
  return out;
}

BoxNormalized box_normalize(const Matrix& K, const Vector& lo, const Vector& up) {
  const Eigen::Index p = K.cols();
  if (lo.size() != p || up.size() != p) throw Error(ErrorCode::DimensionMismatch, "box: bounds have wrong size");
  BoxNormalized out;
  out.scale = Vector::Ones(p);
  out.shift = Vector::Zero(p);
  Vector zlo(p), zup(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double l = lo[i], u = up[i];
    if (std::isnan(l) || std::isnan(u) || l > u || l == kInfinity || u == -kInfinity)
      throw Error(ErrorCode::DomainError, "box: invalid bounds at coordinate " + std::to_string(i));
    const bool fl = std::isfinite(l), fu = std::isfinite(u);
    const int idx = static_cast<int>(i);
    if (fl && fu) {
      out.A.push_back(idx);
      if (u > l) {
        out.scale[i] = 1.0 / (u - l);
        out.shift[i] = -l / (u - l);
        zup[i] = 1.0;
      } else {
        out.shift[i] = -l;
        zup[i] = 0.0;
      }
      zlo[i] = 0.0;
    } else if (fl) {
      out.B.push_back(idx);
      out.shift[i] = -l;
      zlo[i] = 0.0;
      zup[i] = kInfinity;
    } else if (fu) {
      out.B.push_back(idx);
      out.scale[i] = -1.0;
      out.shift[i] = u;
      zlo[i] = 0.0;
      zup[i] = kInfinity;
    } else {
      out.U.push_back(idx);
      zlo[i] = -kInfinity;
      zup[i] = kInfinity;
    }
  }
  out.K_prime = K * out.scale.cwiseInverse().asDiagonal();
  out.y_shift = out.K_prime * out.shift;
  out.constraints = ConstraintSet(Box{zlo, zup});
  return out;
}

BoxReduced box_reduce_k1(const BoxNormalized& norm, const Vector& h_z) {
  const Matrix& K = norm.K_prime;
  const Eigen::Index p = K.cols();
  if (h_z.size() != p) throw Error(ErrorCode::DimensionMismatch, "box reduction: h has wrong size");
  BoxReduced out;
  out.h_plus = h_z.cwiseMax(0.0);
  out.h_minus = (-h_z).cwiseMax(0.0);
  if (!in_row_space(K, out.h_plus) || !in_row_space(K, out.h_minus))
    throw Error(ErrorCode::NotApplicable, "box reduction: h+ and h- must lie in row(K')");
  const Box& zb = std::get<Box>(norm.constraints.variant());
  for (int i : norm.A) {
    out.M_plus_A += out.h_plus[i] * zb.up[i];
    out.M_minus_A += out.h_minus[i] * zb.up[i];
  }
  Matrix E(2, p);
  E.row(0) = out.h_plus.transpose();
  E.row(1) = out.h_minus.transpose();
  out.y_map = E * pseudoinverse(K);
  out.Sigma = out.y_map * out.y_map.transpose();
  out.Sigma = 0.5 * (out.Sigma + out.Sigma.transpose());
  out.tilde_K = Matrix::Zero(2, 6);
  out.tilde_K.row(0).head(3).setOnes();
  out.tilde_K.row(1).tail(3).setOnes();
  out.tilde_h = Vector(6);
  out.tilde_h << 1, 1, 1, -1, -1, -1;

  // blocks with no support in their index set are identically zero
  auto support = [](const Vector& h, const std::vector<int>& idx) {
    return std::any_of(idx.begin(), idx.end(), [&](int i) { return h[i] != 0.0; });
  };
  Vector lo(6), up(6);
  lo << 0, 0, -kInfinity, 0, 0, -kInfinity;
  up << out.M_plus_A, kInfinity, kInfinity, out.M_minus_A, kInfinity, kInfinity;
  const Vector* parts[2] = {&out.h_plus, &out.h_minus};
  for (int b = 0; b < 2; ++b) {
    if (!support(*parts[b], norm.B)) up[3 * b + 1] = 0.0;
    if (!support(*parts[b], norm.U)) {
      lo[3 * b + 2] = 0.0;
      up[3 * b + 2] = 0.0;
    }
  }
  out.whitening = psd_whitening(out.Sigma);
  out.singular_sigma = out.whitening.singular;
  out.spec.K = out.whitening.W * out.tilde_K;
  out.spec.H = out.tilde_h.transpose();
  out.spec.constraints = ConstraintSet(Box{lo, up});

  for (const double a : {0.0, out.M_plus_A})
    for (const double b : {0.0, out.M_minus_A}) {
      Vector c = Vector::Zero(6);
      c[0] = a;
      c[3] = b;
      if (std::none_of(out.candidates.begin(), out.candidates.end(), [&](const Vector& o) { return o == c; }))
        out.candidates.push_back(c);
    }
  return out;
}

BoxSolution box_calibrate_and_solve(const Matrix& K, const Vector& lo, const Vector& up, const Vector& h,
                                    const Vector& y, double alpha, const CalibrationOptions& opts) {
  if (y.size() != K.rows()) throw Error(ErrorCode::DimensionMismatch, "box reduction: y has wrong size");
  const BoxNormalized norm = box_normalize(K, lo, up);
  const BoxReduced red = box_reduce_k1(norm, norm.h_z(h));
  const Vector yr = red.reduce_y(y + norm.y_shift);
  BoxSolution out;
  out.threshold.provenance = ThresholdProvenance::ExtremePointMax;
  out.threshold.delta = -kInfinity;
  for (const Vector& c : red.candidates) {
    const QuantileEstimate q =
        quantile_at(red.spec, TestStatistic::Lambda1, c, alpha, opts.n_samples, opts.seed, opts.sampling);
    ++out.threshold.points_evaluated;
    if (q.value > out.threshold.delta) {
      out.threshold.delta = q.value;
      out.threshold.std_error = q.std_error;
      out.threshold.argmax = c;
    }
  }
  out.threshold.n_samples = opts.n_samples;
  const Interval iv = profile_roots(red.spec, yr, 0.0, out.threshold.delta, red.tilde_h);
  const double off = norm.functional_offset(h);
  out.interval = Interval{iv.lo + off, iv.hi + off};
  return out;
}

}  // namespace confreg
