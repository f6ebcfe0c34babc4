#include "confreg/problem.hpp"

#include "confreg/errors.hpp"
#include "confreg/lp.hpp"

namespace confreg {

const char* to_string(TestStatistic s) noexcept {
  switch (s) {
    case TestStatistic::Lambda1: return "l1";
    case TestStatistic::Lambda2U: return "l2u";
    case TestStatistic::Lambda2C: return "l2c";
  }
  return "?";
}

TestStatistic parse_statistic(const std::string& name) {
  if (name == "l1" || name == "lambda1") return TestStatistic::Lambda1;
  if (name == "l2u" || name == "lambda2u") return TestStatistic::Lambda2U;
  if (name == "l2c" || name == "lambda2c") return TestStatistic::Lambda2C;
  throw Error(ErrorCode::UnsupportedStatistic, "unknown statistic '" + name + "'");
}

void ProblemSpec::validate() const {
  if (H.cols() != K.cols()) throw Error(ErrorCode::DimensionMismatch, "spec: H and K column counts differ");
  if (constraints.dim() != K.cols())
    throw Error(ErrorCode::DimensionMismatch, "spec: constraint dimension differs from columns of K");
  if (!all_finite(K) || !all_finite(H)) throw Error(ErrorCode::DomainError, "spec: non-finite K or H");
  (void)feasible_point();
}

Vector ProblemSpec::feasible_point() const {
  const Inequalities in = constraints.inequalities();
  const Eigen::Index p = constraints.dim();
  if (in.G.rows() == 0) return Vector::Zero(p);
  const FeasibilityResult f = feasibility_lp(Matrix(0, p), Vector(0), in.G, in.g);
  if (!f.feasible) throw Error(ErrorCode::InfeasibleSpec, "spec: constraint set is empty");
  return f.witness;
}

}  // namespace confreg
