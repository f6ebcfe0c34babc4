#pragma once

#include "confreg/problem.hpp"
#include "confreg/qp.hpp"

#include <limits>

namespace confreg {

/// Optimum of the slice program min_{Hx = mu, x in X} ||Kx - y||^2 with the
/// data attached; value is +inf for an empty slice.
struct SliceValue {
  double value = std::numeric_limits<double>::infinity();
  bool feasible = false;
  Vector x;
  /// d value / d mu (= -nu); empty when infeasible.
  Vector gradient;
};

SliceValue slice_optimum(const ProblemSpec& spec, const Vector& mu, const Vector& y,
                         const QpSettings& settings = {});

/// Second term subtracted by the statistic: 0, min_x ||Kx-y||^2 or
/// min_{x in X} ||Kx-y||^2.
double statistic_offset(TestStatistic stat, const ProblemSpec& spec, const Vector& y,
                        const QpSettings& settings = {});

double eval_statistic(TestStatistic stat, const ProblemSpec& spec, const Vector& mu, const Vector& y);

/// T_x(eps) = min_{Hz = 0, z + x in X} ||Kz - eps||^2 minus the matching
/// second term. Throws InfeasibleBasePoint when x is not in X.
double eval_translated(TestStatistic stat, const ProblemSpec& spec, const Vector& x, const Vector& eps);

/// Clamp a difference of two optima that should be >= 0.
double clamp_statistic(double value, double scale);

/// Evaluates lambda(., y) for a fixed y, caching the second term.
class StatisticEvaluator {
 public:
  StatisticEvaluator(const ProblemSpec& spec, TestStatistic stat, Vector y, QpSettings settings = {});

  double offset() const { return offset_; }
  double value(const Vector& mu) const;
  /// Slice optimum (without the offset) and its gradient.
  SliceValue slice(const Vector& mu) const;

  const ProblemSpec& spec() const { return spec_; }
  const Vector& y() const { return y_; }
  TestStatistic statistic() const { return stat_; }

 private:
  ProblemSpec spec_;
  TestStatistic stat_;
  Vector y_;
  QpSettings settings_;
  double offset_ = 0.0;
};

}  // namespace confreg
