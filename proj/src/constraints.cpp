#include "confreg/constraints.hpp"

#include "confreg/errors.hpp"

#include <cmath>
#include <vector>

namespace confreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ConstraintSet::ConstraintSet(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const NonNegative& c) {
                   if (c.p < 0) throw Error(ErrorCode::DimensionMismatch, "negative dimension");
                 },
                 [](const LinearInequality& c) {
                   if (c.A.rows() != c.b.size())
                     throw Error(ErrorCode::DimensionMismatch, "linear constraint: A rows != b size");
                   if (!all_finite(c.A) || !all_finite(c.b))
                     throw Error(ErrorCode::DomainError, "linear constraint: non-finite entries");
                 },
                 [](const Box& c) {
                   if (c.lo.size() != c.up.size())
                     throw Error(ErrorCode::DimensionMismatch, "box: lo/up size mismatch");
                   for (Eigen::Index i = 0; i < c.lo.size(); ++i) {
                     if (std::isnan(c.lo[i]) || std::isnan(c.up[i]) || c.lo[i] > c.up[i])
                       throw Error(ErrorCode::DomainError, "box: lo must not exceed up");
                     if (c.lo[i] == INFINITY || c.up[i] == -INFINITY)
                       throw Error(ErrorCode::DomainError, "box: empty side");
                   }
                 },
                 [](const PolyhedralCone& c) {
                   if (!all_finite(c.A)) throw Error(ErrorCode::DomainError, "cone: non-finite entries");
                 },
             },
             v_);
}

Eigen::Index ConstraintSet::dim() const {
  return std::visit(overloaded{
                        [](const NonNegative& c) { return c.p; },
                        [](const LinearInequality& c) { return c.A.cols(); },
                        [](const Box& c) { return c.lo.size(); },
                        [](const PolyhedralCone& c) { return c.A.cols(); },
                    },
                    v_);
}

std::string ConstraintSet::kind() const {
  return std::visit(overloaded{
                        [](const NonNegative&) { return std::string("nonnegative"); },
                        [](const LinearInequality&) { return std::string("linear"); },
                        [](const Box&) { return std::string("box"); },
                        [](const PolyhedralCone& c) {
                          return std::string(c.A.rows() == 0 ? "none" : "cone");
                        },
                    },
                    v_);
}

bool ConstraintSet::is_cone() const {
  return std::holds_alternative<NonNegative>(v_) || std::holds_alternative<PolyhedralCone>(v_);
}

bool ConstraintSet::is_unconstrained() const { return inequalities().G.rows() == 0; }

Inequalities ConstraintSet::inequalities() const {
  return std::visit(overloaded{
                        [](const NonNegative& c) {
                          return Inequalities{-Matrix::Identity(c.p, c.p), Vector::Zero(c.p)};
                        },
                        [](const LinearInequality& c) { return Inequalities{c.A, c.b}; },
                        [](const Box& c) {
                          const Eigen::Index p = c.lo.size();
                          Matrix G = Matrix::Zero(2 * p, p);
                          Vector g(2 * p);
                          Eigen::Index m = 0;
                          for (Eigen::Index i = 0; i < p; ++i) {
                            if (std::isfinite(c.lo[i])) {
                              G(m, i) = -1.0;
                              g[m++] = -c.lo[i];
                            }
                            if (std::isfinite(c.up[i])) {
                              G(m, i) = 1.0;
                              g[m++] = c.up[i];
                            }
                          }
                          return Inequalities{G.topRows(m), g.head(m)};
                        },
                        [](const PolyhedralCone& c) {
                          return Inequalities{c.A, Vector::Zero(c.A.rows())};
                        },
                    },
                    v_);
}

Matrix ConstraintSet::recession_rows() const { return inequalities().G; }

double ConstraintSet::violation(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "constraint dimension mismatch");
  const Inequalities in = inequalities();
  if (in.G.rows() == 0) return 0.0;
  return std::max(0.0, (in.G * x - in.g).maxCoeff());
}

bool ConstraintSet::contains(const Vector& x, double tol) const { return violation(x) <= tol; }

ConstraintSet ConstraintSet::shifted(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "constraint dimension mismatch");
  const Inequalities in = inequalities();
  return ConstraintSet(LinearInequality{in.G, in.g - in.G * x});
}

}  // namespace confreg
