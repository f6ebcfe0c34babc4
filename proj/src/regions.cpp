#include "confreg/regions.hpp"

#include "confreg/errors.hpp"
#include "confreg/lp.hpp"
#include "confreg/qp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace confreg {

namespace {

struct LineEval {
  bool feasible = false;
  double value = 0.0;  // minus the level
  double slope = 0.0;
};

// sup{t in [0, b] : g(t) <= 0} for g convex with g(0) <= 0. Newton steps
// from the right end (monotone for convex g), bisection when the slice is
// empty or the slope is useless.
double convex_crossing(const std::function<LineEval(double)>& eval, double b, double tol, int max_iter) {
  LineEval eb = eval(b);
  if (eb.feasible && eb.value <= 0.0) return b;
  double lo = 0.0, hi = b;
  double t = b;
  LineEval cur = eb;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    double next;
    if (cur.feasible && cur.slope > 0.0) {
      next = t - cur.value / cur.slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    const LineEval en = eval(next);
    if (en.feasible && en.value <= 0.0) {
      lo = next;
      if (en.value >= -1e-12) return next;
    } else {
      hi = next;
      if (std::abs(t - next) <= tol) return next;
      t = next;
      cur = en;
    }
  }
  return cur.feasible && cur.value <= 1e-9 ? t : lo == 0.0 ? hi : lo;
}

ProblemSpec row_spec(const ProblemSpec& spec, const Vector& h) {
  ProblemSpec s;
  s.K = spec.K;
  s.H = h.transpose();
  s.constraints = spec.constraints;
  return s;
}

QpSolution constrained_fit(const ProblemSpec& spec, const Vector& y) {
  QpProblem pr{spec.K, y, std::nullopt, spec.constraints};
  const QpSolution s = solve_ls(pr);
  if (s.status == QpStatus::Infeasible) throw Error(ErrorCode::InfeasibleSpec, "constraint set is empty");
  if (s.status != QpStatus::Optimal) throw Error(ErrorCode::IterationLimit, "constrained fit did not converge");
  return s;
}

}  // namespace

Region::Region(RegionSpec r)
    : r_(std::move(r)), eval_(r_.spec, r_.stat, r_.y) {
  if (!(r_.threshold.delta >= 0.0) || !std::isfinite(r_.threshold.delta))
    throw Error(ErrorCode::DomainError, "region: threshold must be finite and >= 0");
  center_ = r_.spec.H * constrained_fit(r_.spec, r_.y).x;
}

bool Region::contains(const Vector& mu) const { return eval_.value(mu) <= r_.threshold.delta + 1e-9; }

bool contains(const RegionSpec& region, const Vector& mu) {
  return eval_statistic(region.stat, region.spec, mu, region.y) <= region.threshold.delta + 1e-9;
}

bool IntervalK::contains(const Vector& mu, double tol) const {
  if (static_cast<std::size_t>(mu.size()) != intervals.size())
    throw Error(ErrorCode::DimensionMismatch, "interval box: dimension mismatch");
  for (std::size_t i = 0; i < intervals.size(); ++i)
    if (!intervals[i].contains(mu[static_cast<Eigen::Index>(i)], tol)) return false;
  return true;
}

bool IntervalK::bounded() const {
  return std::all_of(intervals.begin(), intervals.end(), [](const Interval& i) { return i.bounded(); });
}

double IntervalK::volume() const {
  double v = 1.0;
  for (const Interval& i : intervals) v *= i.width();
  return v;
}

Interval profile_roots(const ProblemSpec& spec, const Vector& y, double f_offset, double delta, const Vector& h,
                       const ProfileSettings& settings) {
  if (h.size() != spec.p()) throw Error(ErrorCode::DimensionMismatch, "profile: direction has wrong size");
  const double level = f_offset + delta;
  const QpSolution fit = constrained_fit(spec, y);
  const double phi0 = h.dot(fit.x);
  if (fit.objective > level + 1e-9 * (1.0 + level))
    throw Error(ErrorCode::EmptyRegion, "profile: region is empty");
  if (h.lpNorm<Eigen::Infinity>() == 0.0) return Interval{0.0, 0.0};
  const ProblemSpec rs = row_spec(spec, h);
  const double tol = settings.tol_rel * std::max(1.0, std::abs(phi0));

  Interval out;
  for (const int side : {1, -1}) {
    double& end = side > 0 ? out.hi : out.lo;
    if (recession_direction(spec.K, spec.constraints, h, side).direction_found) {
      end = side * kInfinity;
      continue;
    }
    auto eval = [&](double t) {
      const SliceValue sv = slice_optimum(rs, Vector::Constant(1, phi0 + side * t), y);
      LineEval e;
      e.feasible = sv.feasible;
      if (sv.feasible) {
        e.value = sv.value - level;
        e.slope = side * sv.gradient[0];
      }
      return e;
    };
    // farthest reachable value of h^T x over the constraint set
    const Inequalities in = spec.constraints.inequalities();
    double b = kInfinity;
    if (in.G.rows() > 0) {
      LinearProgram lp;
      lp.cost = -side * h;
      lp.A_eq = Matrix(0, spec.p());
      lp.b_eq = Vector(0);
      lp.A_ub = in.G;
      lp.b_ub = in.g;
      const LpResult r = solve_lp(lp);
      if (r.status == LpStatus::Optimal) b = std::max(0.0, side * h.dot(r.x) - phi0);
    }
    if (!std::isfinite(b)) {
      double step = std::max(1.0, std::abs(phi0));
      int k = 0;
      for (; k < 200; ++k) {
        const LineEval e = eval(step);
        if (!e.feasible || e.value > 0.0) break;
        step *= 2.0;
      }
      if (k == 200) {
        end = side * kInfinity;
        continue;
      }
      b = step;
    }
    const double t = convex_crossing(eval, b, tol, settings.max_iter);
    end = phi0 + side * t;
  }
  return out;
}

IntervalK bounding_box(const RegionSpec& region, const ProfileSettings& settings) {
  const double off = statistic_offset(region.stat, region.spec, region.y);
  IntervalK box;
  for (Eigen::Index i = 0; i < region.spec.k(); ++i)
    box.intervals.push_back(
        profile_roots(region.spec, region.y, off, region.threshold.delta, region.spec.H.row(i).transpose(), settings));
  return box;
}

const char* to_string(BoundKind b) noexcept {
  switch (b) {
    case BoundKind::Finite: return "finite";
    case BoundKind::UpperOnly: return "upper_only";
    case BoundKind::LowerOnly: return "lower_only";
    case BoundKind::Unbounded: return "unbounded";
  }
  return "?";
}

std::vector<BoundKind> boundedness_report(const ProblemSpec& spec) {
  std::vector<BoundKind> out;
  for (Eigen::Index i = 0; i < spec.k(); ++i) {
    const Vector h = spec.H.row(i).transpose();
    const bool up = recession_direction(spec.K, spec.constraints, h, 1).direction_found;
    const bool down = recession_direction(spec.K, spec.constraints, h, -1).direction_found;
    if (up && down) {
      out.push_back(BoundKind::Unbounded);
    } else if (up) {
      out.push_back(BoundKind::LowerOnly);
    } else if (down) {
      out.push_back(BoundKind::UpperOnly);
    } else {
      out.push_back(BoundKind::Finite);
    }
  }
  return out;
}

namespace {

SplitRegion build_split_common(const ProblemSpec& spec, const Vector& y, double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0) || !(alpha1 + alpha2 < 1.0))
    throw Error(ErrorCode::DomainError, "split region: need alpha1, alpha2 > 0 and alpha1 + alpha2 < 1");
  if (y.size() != spec.n()) throw Error(ErrorCode::DimensionMismatch, "split region: y has wrong size");
  const SplitMatrices sm = row_null_split(spec.K, spec.H);
  SplitRegion sr;
  sr.parallel.center = spec.H * pseudoinverse(spec.K) * y;
  sr.parallel.shape = sm.Sigma_parallel;
  const PsdFactor pf = psd_whitening(sm.Sigma_parallel);
  sr.parallel.factor = pf.sqrt_factor;
  sr.parallel.radius2 = pf.rank == 0 ? 0.0 : chi2_quantile(static_cast<int>(pf.rank), 1.0 - alpha1);
  sr.parallel.alpha1 = alpha1;
  sr.alpha2 = alpha2;
  sr.perp.spec.K = spec.K;
  sr.perp.spec.H = sm.H_perp;
  sr.perp.spec.constraints = spec.constraints;
  sr.perp.stat = TestStatistic::Lambda1;
  sr.perp.y = y;
  return sr;
}

}  // namespace

SplitRegion split_region_build(const ProblemSpec& spec, const Vector& y, double alpha1, double alpha2,
                               PerpThreshold perp_method, const CalibrationOptions& opts) {
  SplitRegion sr = build_split_common(spec, y, alpha1, alpha2);
  sr.perp.threshold = global_threshold(sr.perp.spec, TestStatistic::Lambda1, alpha2,
                                       perp_method == PerpThreshold::Naive ? ThresholdMethod::ChiSqN
                                                                           : ThresholdMethod::Auto,
                                       opts);
  return sr;
}

SplitRegion split_region_build(const ProblemSpec& spec, const Vector& y, double alpha1, double alpha2,
                               const ThresholdRule& perp_threshold) {
  SplitRegion sr = build_split_common(spec, y, alpha1, alpha2);
  sr.perp.threshold = perp_threshold;
  return sr;
}

bool split_contains(const SplitRegion& split, const Vector& mu) {
  const ProblemSpec& ps = split.perp.spec;
  const Eigen::Index p = ps.p();
  const Eigen::Index k = ps.k();
  if (mu.size() != k) throw Error(ErrorCode::DimensionMismatch, "split region: mu has wrong size");
  const Matrix& L = split.parallel.factor;
  const Eigen::Index r = L.cols();
  const double d2 = split.perp.threshold.delta;
  const double q = split.parallel.radius2;
  const Vector rhs = mu - split.parallel.center;
  const Inequalities in = ps.constraints.inequalities();

  LsqSystem s;
  s.E = Matrix(k, p + r);
  s.E.leftCols(p) = ps.H;
  if (r > 0) s.E.rightCols(r) = L;
  s.f = rhs;
  s.G = Matrix::Zero(in.G.rows(), p + r);
  if (in.G.rows() > 0) s.G.leftCols(p) = in.G;
  s.g = in.g;
  const Eigen::Index n = ps.n();
  const double tol = 1e-9 * (1.0 + d2 + q);

  bool witness = false;
  bool infeasible = false;
  auto phi = [&](double t) {
    s.K = Matrix::Zero(n + r, p + r);
    s.K.topLeftCorner(n, p) = std::sqrt(t) * ps.K;
    if (r > 0) s.K.bottomRightCorner(r, r) = std::sqrt(1.0 - t) * Matrix::Identity(r, r);
    s.y = Vector::Zero(n + r);
    s.y.head(n) = std::sqrt(t) * split.perp.y;
    const QpSolution sol = solve_lsq(s);
    if (sol.status != QpStatus::Optimal) {
      infeasible = true;
      return kInfinity;
    }
    const Vector x = sol.x.head(p);
    const double fx = (ps.K * x - split.perp.y).squaredNorm();
    const double gs = r > 0 ? sol.x.tail(r).squaredNorm() : 0.0;
    if (fx <= d2 + tol && gs <= q + tol) witness = true;
    return sol.objective - t * d2 - (1.0 - t) * q;
  };

  // phi is concave on [0, 1]: golden-section search for its maximum, with
  // early exits on a positive value or an explicit witness.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  for (const double t : {0.5, 0.0, 1.0}) {
    const double v = phi(t);
    if (infeasible) return false;
    if (witness) return true;
    if (v > tol) return false;
  }
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 60; ++it) {
    if (witness) return true;
    if (fc > tol || fd > tol) return false;
    if (b - a < 1e-10) break;
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    }
  }
  return witness || std::max(fc, fd) <= tol;
}

namespace {

// A point of the split region attaining the support value in direction u.
Vector split_support_point(const SplitRegion& split, const Vector& u) {
  const Vector su = split.parallel.shape * u;
  const double s2 = u.dot(su);
  Vector par = split.parallel.center;
  if (s2 > 0.0) par += std::sqrt(split.parallel.radius2 / s2) * su;
  const ProblemSpec& ps = split.perp.spec;
  const Vector h = ps.H.transpose() * u;
  const Interval iv = profile_roots(ps, split.perp.y, 0.0, split.perp.threshold.delta, h);
  if (!std::isfinite(iv.hi)) throw Error(ErrorCode::DomainError, "split area: region is unbounded");
  Vector x;
  if (h.lpNorm<Eigen::Infinity>() == 0.0) {
    x = constrained_fit(ps, split.perp.y).x;
  } else {
    const SliceValue sv = slice_optimum(row_spec(ps, h), Vector::Constant(1, iv.hi), split.perp.y);
    if (!sv.feasible) throw Error(ErrorCode::Internal, "split area: support slice is empty");
    x = sv.x;
  }
  return par + ps.H * x;
}

}  // namespace

double split_support(const SplitRegion& split, const Vector& u) {
  const double par =
      u.dot(split.parallel.center) + std::sqrt(std::max(0.0, split.parallel.radius2 * u.dot(split.parallel.shape * u)));
  const Vector h = split.perp.spec.H.transpose() * u;
  const Interval iv = profile_roots(split.perp.spec, split.perp.y, 0.0, split.perp.threshold.delta, h);
  return par + iv.hi;
}

double split_area(const SplitRegion& split, int n_angles) {
  if (split.perp.spec.k() != 2) throw Error(ErrorCode::NotTwoDimensional, "split area: k must be 2");
  if (n_angles < 3) throw Error(ErrorCode::DomainError, "split area: need at least 3 angles");
  // support points in angular order trace a convex polygon inscribed in the region
  std::vector<Vector> verts;
  for (int i = 0; i < n_angles; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n_angles;
    Vector u(2);
    u << std::cos(th), std::sin(th);
    verts.push_back(split_support_point(split, u));
  }
  double area = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vector& p0 = verts[i];
    const Vector& p1 = verts[(i + 1) % verts.size()];
    area += p0[0] * p1[1] - p1[0] * p0[1];
  }
  return 0.5 * std::abs(area);
}

double area_2d(const std::function<bool(const Vector&)>& contains_fn, const Vector& interior_point,
               const AreaSettings& settings) {
  if (interior_point.size() != 2) throw Error(ErrorCode::NotTwoDimensional, "area: need a 2-d region");
  if (settings.n_angles < 3) throw Error(ErrorCode::DomainError, "area: need at least 3 angles");
  if (!contains_fn(interior_point)) throw Error(ErrorCode::InteriorPointOutside, "area: interior point is outside");
  double sum = 0.0;
  const double dth = 2.0 * std::numbers::pi / settings.n_angles;
  for (int i = 0; i < settings.n_angles; ++i) {
    Vector u(2);
    u << std::cos(i * dth), std::sin(i * dth);
    double lo = 0.0, hi = 1.0;
    int k = 0;
    while (contains_fn(interior_point + hi * u)) {
      lo = hi;
      hi *= 2.0;
      if (++k > 60) throw Error(ErrorCode::DomainError, "area: region looks unbounded");
    }
    while (hi - lo > settings.r_tol) {
      const double mid = 0.5 * (lo + hi);
      if (contains_fn(interior_point + mid * u)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double r = 0.5 * (lo + hi);
    sum += r * r;
  }
  return 0.5 * sum * dth;
}

std::vector<BoundaryPoint> region_boundary(const Region& region, const AreaSettings& settings) {
  const ProblemSpec& spec = region.spec().spec;
  if (spec.k() != 2) throw Error(ErrorCode::NotTwoDimensional, "boundary: k must be 2");
  if (settings.n_angles < 3) throw Error(ErrorCode::DomainError, "boundary: need at least 3 angles");
  const Vector c = region.center();
  if (!region.contains(c)) throw Error(ErrorCode::EmptyRegion, "boundary: region is empty");
  const IntervalK box = bounding_box(region.spec());
  if (!box.bounded()) throw Error(ErrorCode::DomainError, "boundary: region is unbounded");
  const double R = 1.01 * std::hypot(box.intervals[0].width(), box.intervals[1].width()) + 1e-9;
  const double level = region.level();
  const StatisticEvaluator& ev = region.evaluator();
  std::vector<BoundaryPoint> out;
  const double dth = 2.0 * std::numbers::pi / settings.n_angles;
  for (int i = 0; i < settings.n_angles; ++i) {
    Vector u(2);
    u << std::cos(i * dth), std::sin(i * dth);
    auto eval = [&](double t) {
      const SliceValue sv = ev.slice(c + t * u);
      LineEval e;
      e.feasible = sv.feasible;
      if (sv.feasible) {
        e.value = sv.value - level;
        e.slope = sv.gradient.dot(u);
      }
      return e;
    };
    BoundaryPoint bp;
    bp.theta = i * dth;
    bp.r = convex_crossing(eval, R, settings.r_tol, 200);
    bp.mu = c + bp.r * u;
    out.push_back(bp);
  }
  return out;
}

double polar_area(const std::vector<BoundaryPoint>& boundary) {
  if (boundary.empty()) return 0.0;
  const double dth = 2.0 * std::numbers::pi / static_cast<double>(boundary.size());
  double s = 0.0;
  for (const BoundaryPoint& b : boundary) s += b.r * b.r;
  return 0.5 * s * dth;
}

double region_area(const Region& region, const AreaSettings& settings) {
  return polar_area(region_boundary(region, settings));
}

std::string boundary_csv(const std::vector<BoundaryPoint>& boundary) {
  std::ostringstream os;
  os << std::setprecision(12) << "theta,r,mu1,mu2\n";
  for (const BoundaryPoint& b : boundary) os << b.theta << ',' << b.r << ',' << b.mu[0] << ',' << b.mu[1] << '\n';
  return os.str();
}

}  // namespace confreg
