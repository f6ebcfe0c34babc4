#pragma once

#include "confreg/calibration.hpp"
#include "confreg/statistics.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace confreg {

struct RegionSpec {
  ProblemSpec spec;
  TestStatistic stat = TestStatistic::Lambda1;
  ThresholdRule threshold;
  Vector y;
};

/// {mu : lambda(mu, y) <= delta}.
class Region {
 public:
  explicit Region(RegionSpec r);

  bool contains(const Vector& mu) const;
  double value(const Vector& mu) const { return eval_.value(mu); }
  /// Bound on the slice optimum: offset + delta.
  double level() const { return eval_.offset() + r_.threshold.delta; }
  double offset() const { return eval_.offset(); }
  double delta() const { return r_.threshold.delta; }
  const RegionSpec& spec() const { return r_; }
  const StatisticEvaluator& evaluator() const { return eval_; }

  /// H x_hat for the constrained least-squares fit x_hat; every statistic is
  /// smallest there.
  const Vector& center() const { return center_; }
  bool empty() const { return !contains(center_); }

 private:
  RegionSpec r_;
  StatisticEvaluator eval_;
  Vector center_;
};

bool contains(const RegionSpec& region, const Vector& mu);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double width() const { return hi - lo; }
  bool contains(double v, double tol = 1e-9) const { return v >= lo - tol && v <= hi + tol; }
};

struct IntervalK {
  std::vector<Interval> intervals;

  bool contains(const Vector& mu, double tol = 1e-9) const;
  bool bounded() const;
  /// Product of widths (inf when unbounded).
  double volume() const;
};

struct ProfileSettings {
  double tol_rel = 1e-8;
  int max_iter = 200;
};

/// {phi : L(phi) <= f_offset + delta}, L(phi) = min_{h^T x = phi, x in X} ||Kx - y||^2.
/// Unbounded sides are settled by a recession LP before any root search.
Interval profile_roots(const ProblemSpec& spec, const Vector& y, double f_offset, double delta, const Vector& h,
                       const ProfileSettings& settings = {});

/// Per-row profile intervals (the x-description box).
IntervalK bounding_box(const RegionSpec& region, const ProfileSettings& settings = {});

enum class BoundKind { Finite, UpperOnly, LowerOnly, Unbounded };

const char* to_string(BoundKind b) noexcept;

/// UpperOnly: (-inf, U]; LowerOnly: [L, inf).
std::vector<BoundKind> boundedness_report(const ProblemSpec& spec);

enum class PerpThreshold { Naive, Refined };

struct SplitRegion {
  struct Parallel {
    Vector center;
    Matrix shape;  // Sigma_parallel
    double radius2 = 0.0;
    double alpha1 = 0.0;
    Matrix factor;  // k x rank, shape = factor factor^T
  } parallel;
  RegionSpec perp;  // lambda1 over H_perp
  double alpha2 = 0.0;
};

SplitRegion split_region_build(const ProblemSpec& spec, const Vector& y, double alpha1, double alpha2,
                               PerpThreshold perp_method, const CalibrationOptions& opts = {});

/// Same, reusing an already calibrated perp threshold.
SplitRegion split_region_build(const ProblemSpec& spec, const Vector& y, double alpha1, double alpha2,
                               const ThresholdRule& perp_threshold);

bool split_contains(const SplitRegion& split, const Vector& mu);

/// Support function of the split region in direction u.
double split_support(const SplitRegion& split, const Vector& u);

/// Area of the polygon through support points in n_angles directions (inner approximation).
double split_area(const SplitRegion& split, int n_angles = 720);

struct AreaSettings {
  int n_angles = 720;
  double r_tol = 1e-6;
};

/// Polar quadrature with expansion-then-bisection on each ray.
double area_2d(const std::function<bool(const Vector&)>& contains_fn, const Vector& interior_point,
               const AreaSettings& settings = {});

struct BoundaryPoint {
  double theta = 0.0;
  double r = 0.0;
  Vector mu;
};

/// Boundary radii of a mu-description along n_angles rays from its center,
/// using Newton steps on the slice optimum. Throws EmptyRegion /
/// NotTwoDimensional / InteriorPointOutside.
std::vector<BoundaryPoint> region_boundary(const Region& region, const AreaSettings& settings = {});

double region_area(const Region& region, const AreaSettings& settings = {});

double polar_area(const std::vector<BoundaryPoint>& boundary);

/// "theta,r,mu1,mu2" rows.
std::string boundary_csv(const std::vector<BoundaryPoint>& boundary);

}  // namespace confreg
