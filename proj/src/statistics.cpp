#include "confreg/statistics.hpp"

#include "confreg/errors.hpp"

#include <cmath>
#include <string>

namespace confreg {

namespace {

QpSolution checked(const QpSolution& s) {
  if (s.status == QpStatus::IterationLimit)
    throw Error(ErrorCode::IterationLimit, "statistic: QP iteration limit reached");
  return s;
}

}  // namespace

double clamp_statistic(double value, double scale) {
  if (std::isinf(value)) return value;
  if (value < -1e-6 * (1.0 + scale))
    throw Error(ErrorCode::Internal, "statistic: negative difference of optima " + std::to_string(value));
  return std::max(0.0, value);
}

SliceValue slice_optimum(const ProblemSpec& spec, const Vector& mu, const Vector& y, const QpSettings& settings) {
  if (mu.size() != spec.k()) throw Error(ErrorCode::DimensionMismatch, "statistic: mu has wrong size");
  if (y.size() != spec.n()) throw Error(ErrorCode::DimensionMismatch, "statistic: y has wrong size");
  QpProblem pr{spec.K, y, EqualitySlice{spec.H, mu}, spec.constraints};
  const QpSolution s = checked(solve_ls(pr, settings));
  SliceValue out;
  if (s.status != QpStatus::Optimal) return out;
  out.feasible = true;
  out.value = s.objective;
  out.x = s.x;
  out.gradient = -s.nu;
  return out;
}

double statistic_offset(TestStatistic stat, const ProblemSpec& spec, const Vector& y, const QpSettings& settings) {
  switch (stat) {
    case TestStatistic::Lambda1: return 0.0;
    case TestStatistic::Lambda2U: return min_unconstrained(spec.K, y);
    case TestStatistic::Lambda2C: {
      QpProblem pr{spec.K, y, std::nullopt, spec.constraints};
      const QpSolution s = checked(solve_ls(pr, settings));
      if (s.status != QpStatus::Optimal) throw Error(ErrorCode::InfeasibleSpec, "statistic: constraint set empty");
      return s.objective;
    }
  }
  return 0.0;
}

double eval_statistic(TestStatistic stat, const ProblemSpec& spec, const Vector& mu, const Vector& y) {
  const SliceValue s = slice_optimum(spec, mu, y);
  if (!s.feasible) return std::numeric_limits<double>::infinity();
  const double off = statistic_offset(stat, spec, y);
  return clamp_statistic(s.value - off, s.value);
}

double eval_translated(TestStatistic stat, const ProblemSpec& spec, const Vector& x, const Vector& eps) {
  if (x.size() != spec.p() || eps.size() != spec.n())
    throw Error(ErrorCode::DimensionMismatch, "translated statistic: dimensions");
  const double viol = spec.constraints.violation(x);
  if (viol > 1e-8) throw Error(ErrorCode::InfeasibleBasePoint, "translated statistic: x violates constraints");
  const ConstraintSet shifted = spec.constraints.shifted(x);
  QpProblem pr{spec.K, eps, EqualitySlice{spec.H, Vector::Zero(spec.k())}, shifted};
  const QpSolution s = checked(solve_ls(pr));
  if (s.status != QpStatus::Optimal) return std::numeric_limits<double>::infinity();
  double off = 0.0;
  if (stat == TestStatistic::Lambda2U) {
    off = min_unconstrained(spec.K, eps);
  } else if (stat == TestStatistic::Lambda2C) {
    QpProblem full{spec.K, eps, std::nullopt, shifted};
    off = checked(solve_ls(full)).objective;
  }
  return clamp_statistic(s.objective - off, s.objective);
}

StatisticEvaluator::StatisticEvaluator(const ProblemSpec& spec, TestStatistic stat, Vector y, QpSettings settings)
    : spec_(spec), stat_(stat), y_(std::move(y)), settings_(settings) {
  if (y_.size() != spec_.n()) throw Error(ErrorCode::DimensionMismatch, "statistic: y has wrong size");
  offset_ = statistic_offset(stat_, spec_, y_, settings_);
}

SliceValue StatisticEvaluator::slice(const Vector& mu) const { return slice_optimum(spec_, mu, y_, settings_); }

double StatisticEvaluator::value(const Vector& mu) const {
  const SliceValue s = slice(mu);
  if (!s.feasible) return std::numeric_limits<double>::infinity();
  return clamp_statistic(s.value - offset_, s.value);
}

}  // namespace confreg
