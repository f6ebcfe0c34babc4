#include "doctest.h"

#include "confreg/errors.hpp"
#include "confreg/regions.hpp"
#include "confreg/statistics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace confreg;

namespace {

ProblemSpec toy() {
  ProblemSpec s;
  s.K = Matrix(2, 3);
  s.K << 2, 1, 1, 0, 1, 1;
  s.H = Matrix(2, 3);
  s.H << 1, -1, 0, 0, 1, -1;
  s.constraints = ConstraintSet::nonnegative(3);
  return s;
}

ProblemSpec identity2(ConstraintSet c = ConstraintSet::none(2)) {
  ProblemSpec s;
  s.K = Matrix::Identity(2, 2);
  s.H = Matrix::Identity(2, 2);
  s.constraints = std::move(c);
  return s;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

double profile_L(const ProblemSpec& s, const Vector& h, double phi, const Vector& y) {
  ProblemSpec r = s;
  r.H = h.transpose();
  return slice_optimum(r, Vector::Constant(1, phi), y).value;
}

}  // namespace

TEST_CASE("wald interval") {
  ProblemSpec s;
  s.K = Matrix::Identity(2, 2);
  s.H = Matrix(1, 2);
  s.H << 1, 0;
  s.constraints = ConstraintSet::none(2);
  const Vector y = vec({0.7, -2.0});
  const Interval iv = profile_roots(s, y, 0.0, 3.84, s.H.row(0).transpose());
  CHECK(iv.lo == doctest::Approx(0.7 - std::sqrt(3.84)).epsilon(1e-8));
  CHECK(iv.hi == doctest::Approx(0.7 + std::sqrt(3.84)).epsilon(1e-8));
}

TEST_CASE("region membership") {
  RegionSpec r{toy(), TestStatistic::Lambda1, ThresholdRule::user(2.0), vec({1.0, 0.5})};
  const Region reg(r);
  CHECK(reg.contains(reg.center()));
  CHECK(contains(r, reg.center()));
  CHECK_FALSE(reg.contains(vec({50.0, 50.0})));
  CHECK(reg.level() == doctest::Approx(2.0));

  RegionSpec e{toy(), TestStatistic::Lambda1, ThresholdRule::user(1.0), vec({-1.0, -1.0})};
  const Region empty(e);
  CHECK(empty.empty());
  CHECK_THROWS_AS(bounding_box(e), Error);

  RegionSpec u{toy(), TestStatistic::Lambda2C, ThresholdRule::user(1.0), vec({-1.0, -1.0})};
  CHECK_FALSE(Region(u).empty());
}

TEST_CASE("toy profile against a grid") {
  const ProblemSpec s = toy();
  const Vector y = vec({2.0, 1.0});
  const double delta = 3.0;
  for (int row = 0; row < 2; ++row) {
    const Vector h = s.H.row(row).transpose();
    const Interval iv = profile_roots(s, y, 0.0, delta, h);
    REQUIRE(iv.bounded());
    CHECK(std::abs(profile_L(s, h, iv.lo, y) - delta) <= 1e-6 * (1 + delta));
    CHECK(std::abs(profile_L(s, h, iv.hi, y) - delta) <= 1e-6 * (1 + delta));
    double glo = kInfinity, ghi = -kInfinity;
    const double step = 1e-3;
    for (double phi = -10.0; phi <= 10.0; phi += step) {
      if (profile_L(s, h, phi, y) <= delta) {
        glo = std::min(glo, phi);
        ghi = std::max(ghi, phi);
      }
    }
    CHECK(std::abs(glo - iv.lo) <= step);
    CHECK(std::abs(ghi - iv.hi) <= step);
  }
}

TEST_CASE("profile is convex") {
  const ProblemSpec s = toy();
  const Vector y = vec({1.0, 2.0});
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int row = 0; row < 2; ++row) {
    const Vector h = s.H.row(row).transpose();
    for (int i = 0; i < 100; ++i) {
      const double a = u(g), b = u(g);
      const double la = profile_L(s, h, a, y), lb = profile_L(s, h, b, y);
      const double lm = profile_L(s, h, 0.5 * (a + b), y);
      if (std::isfinite(la) && std::isfinite(lb)) CHECK(lm <= 0.5 * (la + lb) + 1e-7 * (1 + la + lb));
    }
  }
}

TEST_CASE("recession gives infinite sides") {
  ProblemSpec s;
  s.K = Matrix(1, 2);
  s.K << 1, 0;
  s.H = Matrix(1, 2);
  s.H << 0, 1;
  s.constraints = ConstraintSet::none(2);
  const Interval iv = profile_roots(s, vec({0.3}), 0.0, 1.0, s.H.row(0).transpose());
  CHECK(iv.lo == -kInfinity);
  CHECK(iv.hi == kInfinity);
  CHECK(boundedness_report(s)[0] == BoundKind::Unbounded);

  s.constraints = ConstraintSet::nonnegative(2);
  const Interval half = profile_roots(s, vec({0.3}), 0.0, 1.0, s.H.row(0).transpose());
  CHECK(half.lo == doctest::Approx(0.0));
  CHECK(half.hi == kInfinity);
  CHECK(boundedness_report(s)[0] == BoundKind::LowerOnly);

  s.H << 0, -1;
  CHECK(boundedness_report(s)[0] == BoundKind::UpperOnly);
}

TEST_CASE("boundedness of the toy problem") {
  const auto rep = boundedness_report(toy());
  REQUIRE(rep.size() == 2);
  CHECK(rep[0] == BoundKind::Finite);
  CHECK(rep[1] == BoundKind::Finite);
  ProblemSpec free = toy();
  free.constraints = ConstraintSet::none(3);
  CHECK(boundedness_report(free)[0] == BoundKind::Unbounded);
  CHECK(boundedness_report(free)[1] == BoundKind::Unbounded);
  free.H << 1, -0.5, -0.5, 0, 1, -1;
  CHECK(boundedness_report(free)[0] == BoundKind::Finite);
  CHECK(std::string(to_string(BoundKind::LowerOnly)) == "lower_only");
}

TEST_CASE("bounding box contains region samples") {
  const RegionSpec r{toy(), TestStatistic::Lambda2U, ThresholdRule::user(4.0), vec({1.0, 1.5})};
  const Region reg(r);
  const IntervalK box = bounding_box(r);
  REQUIRE(box.bounded());
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int inside = 0;
  for (int i = 0; i < 400; ++i) {
    const Vector mu = vec({u(g), u(g)});
    if (reg.contains(mu)) {
      ++inside;
      CHECK(box.contains(mu, 1e-6));
    }
  }
  CHECK(inside > 0);
}

TEST_CASE("nested thresholds give nested regions") {
  const Vector y = vec({1.0, 0.2});
  const RegionSpec a{toy(), TestStatistic::Lambda1, ThresholdRule::user(2.0), y};
  const RegionSpec b{toy(), TestStatistic::Lambda1, ThresholdRule::user(5.0), y};
  const IntervalK ba = bounding_box(a), bb = bounding_box(b);
  for (int i = 0; i < 2; ++i) {
    CHECK(bb.intervals[i].lo <= ba.intervals[i].lo + 1e-9);
    CHECK(bb.intervals[i].hi >= ba.intervals[i].hi - 1e-9);
  }
  const Region ra(a), rb(b);
  for (const BoundaryPoint& p : region_boundary(ra, {72, 1e-7})) CHECK(rb.contains(p.mu));
  CHECK(region_area(ra, {360, 1e-7}) < region_area(rb, {360, 1e-7}));
}

TEST_CASE("area of simple shapes") {
  const auto disk = [](const Vector& v) { return v.squaredNorm() <= 1.0; };
  CHECK(area_2d(disk, Vector::Zero(2)) == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  const auto box = [](const Vector& v) { return v[0] >= 0 && v[0] <= 1 && v[1] >= 0 && v[1] <= 1; };
  CHECK(area_2d(box, vec({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(area_2d(box, vec({2.0, 2.0})), Error);
  CHECK_THROWS_AS(area_2d(disk, Vector::Zero(3)), Error);
}

TEST_CASE("region area matches closed form and membership") {
  const RegionSpec r{identity2(), TestStatistic::Lambda1, ThresholdRule::user(2.0), vec({0.5, -1.0})};
  const Region reg(r);
  CHECK(region_area(reg) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-3));

  const RegionSpec t{toy(), TestStatistic::Lambda2U, ThresholdRule::user(3.0), vec({1.0, 1.0})};
  const Region rt(t);
  const double a1 = region_area(rt, {360, 1e-7});
  const double a2 = area_2d([&](const Vector& m) { return rt.contains(m); }, rt.center(), {360, 1e-7});
  CHECK(a1 == doctest::Approx(a2).epsilon(1e-4));
  const std::string csv = boundary_csv(region_boundary(rt, {8, 1e-7}));
  CHECK(csv.rfind("theta,r,mu1,mu2\n", 0) == 0);
}

TEST_CASE("split region for the toy problem") {
  const ProblemSpec s = toy();
  const Vector y = vec({1.5, 1.0});
  const SplitRegion sr = split_region_build(s, y, 0.025, 0.025, ThresholdRule::user(5.0));
  CHECK(sr.parallel.shape(0, 0) == doctest::Approx(1.25));
  CHECK(std::abs(sr.parallel.shape(1, 1)) < 1e-12);
  CHECK(sr.parallel.factor.cols() == 1);
  CHECK(sr.parallel.radius2 == doctest::Approx(5.0238861873).epsilon(1e-8));
  const Region perp(sr.perp);
  const Vector c = sr.parallel.center + perp.center();
  CHECK(split_contains(sr, c));
  CHECK_FALSE(split_contains(sr, vec({40.0, 0.0})));

  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int inside = 0;
  for (int i = 0; i < 200; ++i) {
    const Vector mu = vec({u(g), u(g)});
    if (!split_contains(sr, mu)) continue;
    ++inside;
    for (int j = 0; j < 8; ++j) {
      const double th = j * std::numbers::pi / 4;
      const Vector d = vec({std::cos(th), std::sin(th)});
      CHECK(d.dot(mu) <= split_support(sr, d) + 1e-6);
    }
  }
  CHECK(inside > 0);
  const double a = split_area(sr, 360);
  const double b = area_2d([&](const Vector& m) { return split_contains(sr, m); }, c, {180, 1e-6});
  CHECK(a == doctest::Approx(b).epsilon(1e-3));
  // H_perp has rank one here, so the region is a parallelogram
  const Vector pu = vec({0.0, 1.0});
  const double height = split_support(sr, pu) + split_support(sr, -pu);
  const double width = 2.0 * std::sqrt(sr.parallel.radius2 * 1.25);
  CHECK(a == doctest::Approx(width * height).epsilon(1e-6));
}

TEST_CASE("split region with full-rank K") {
  const SplitRegion sr = split_region_build(identity2(), vec({1.0, 2.0}), 0.05, 0.05, ThresholdRule::user(1.0));
  CHECK(sr.perp.spec.H.norm() < 1e-12);
  const double q = sr.parallel.radius2;
  CHECK(q == doctest::Approx(5.9914645471).epsilon(1e-8));
  CHECK(split_contains(sr, vec({1.0 + 0.99 * std::sqrt(q), 2.0})));
  CHECK_FALSE(split_contains(sr, vec({1.0 + 1.01 * std::sqrt(q), 2.0})));
  CHECK(split_area(sr, 720) == doctest::Approx(std::numbers::pi * q).epsilon(1e-3));
}
