#include "doctest.h"

#include "confreg/errors.hpp"
#include "confreg/qp.hpp"

#include <random>

using namespace confreg;

namespace {

Matrix rnd(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

Vector rndv(std::mt19937_64& rng, Eigen::Index n) { return rnd(rng, n, 1).col(0); }

Matrix toy_K() {
  Matrix K(2, 3);
  K << 2, 1, 1, 0, 1, 1;
  return K;
}

Matrix toy_H() {
  Matrix H(2, 3);
  H << 1, -1, 0, 0, 1, -1;
  return H;
}

}  // namespace

TEST_CASE("clipping and symmetric projection") {
  QpProblem pr;
  pr.K = Matrix::Identity(2, 2);
  pr.y = Vector(2);
  pr.y << -1, 2;
  pr.constraints = ConstraintSet::nonnegative(2);
  QpSolution s = solve_ls(pr);
  REQUIRE(s.status == QpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(0.0));
  CHECK(s.x[1] == doctest::Approx(2.0));
  CHECK(s.objective == doctest::Approx(1.0));

  pr.y.setZero();
  pr.equality = EqualitySlice{Matrix::Ones(1, 2), Vector::Constant(1, 2.0)};
  s = solve_ls(pr);
  REQUIRE(s.status == QpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("toy slice against a one-parameter grid") {
  // H x = 0 forces x = (t, t, t); t >= 0 from the orthant.
  for (const double y1 : {20.0, -3.0, 1.0}) {
    QpProblem pr;
    pr.K = toy_K();
    pr.y = Vector(2);
    pr.y << y1, 10.0;
    pr.equality = EqualitySlice{toy_H(), Vector::Zero(2)};
    pr.constraints = ConstraintSet::nonnegative(3);
    const QpSolution s = solve_ls(pr);
    REQUIRE(s.status == QpStatus::Optimal);
    double best = 1e300;
    for (int i = 0; i <= 200000; ++i) {
      const double t = i * 1e-4;
      const Vector x = Vector::Constant(3, t);
      best = std::min(best, (pr.K * x - pr.y).squaredNorm());
    }
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("min_unconstrained") {
  Vector y(2);
  y << 5, -1;
  CHECK(min_unconstrained(toy_K(), y) < 1e-20);
  Matrix K(2, 1);
  K << 1, 0;
  y << 3, 4;
  CHECK(min_unconstrained(K, y) == doctest::Approx(16.0));

  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    QpProblem pr;
    pr.K = rnd(rng, 5, 3);
    pr.y = rndv(rng, 5);
    const QpSolution s = solve_ls(pr);
    CHECK(std::abs(s.objective - min_unconstrained(pr.K, pr.y)) < 1e-8);
  }
}

TEST_CASE("KKT residuals on random feasible problems") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick(2, 8);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index p = pick(rng);
    const Eigen::Index n = std::max<Eigen::Index>(1, pick(rng) - 1);
    LsqSystem s;
    s.K = rnd(rng, n, p);
    s.y = 3.0 * rndv(rng, n);
    const Vector x0 = rndv(rng, p);
    const Eigen::Index mi = pick(rng);
    s.G = rnd(rng, mi, p);
    s.g = s.G * x0 + rndv(rng, mi).cwiseAbs();
    const Eigen::Index me = t % 3;
    s.E = rnd(rng, me, p);
    s.f = s.E * x0;
    const QpSolution sol = solve_lsq(s);
    REQUIRE(sol.status == QpStatus::Optimal);
    CHECK(sol.primal_residual <= 1e-6);
    CHECK(sol.dual_residual <= 1e-6 * (1.0 + s.K.norm() * s.K.norm() * (1.0 + sol.x.norm())));
    CHECK(sol.complementarity <= 1e-6);
    CHECK(sol.lambda.minCoeff() >= 0.0);
  }
}

TEST_CASE("ADMM agrees with the active-set solver") {
  std::mt19937_64 rng(77);
  QpSettings admm;
  admm.algorithm = QpAlgorithm::Admm;
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index p = 2 + t % 4;
    LsqSystem s;
    s.K = rnd(rng, p + 1, p);
    s.y = rndv(rng, p + 1);
    s.G = -Matrix::Identity(p, p);
    s.g = Vector::Zero(p);
    s.E = rnd(rng, 1, p).cwiseAbs();
    s.f = Vector::Constant(1, 1.0);
    const QpSolution a = solve_lsq(s);
    const QpSolution b = solve_lsq(s, admm);
    REQUIRE(a.status == QpStatus::Optimal);
    REQUIRE(b.status == QpStatus::Optimal);
    CHECK(std::abs(a.objective - b.objective) <= 1e-6 * (1.0 + a.objective));
  }
}

TEST_CASE("adding constraints never lowers the optimum") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index p = 4;
    LsqSystem s;
    s.K = rnd(rng, 3, p);
    s.y = 2.0 * rndv(rng, 3);
    const Vector x0 = rndv(rng, p);
    Matrix G = rnd(rng, 6, p);
    Vector g = G * x0 + rndv(rng, 6).cwiseAbs();
    double prev = -1.0;
    for (Eigen::Index m = 0; m <= 6; ++m) {
      s.G = G.topRows(m);
      s.g = g.head(m);
      const QpSolution sol = solve_lsq(s);
      REQUIRE(sol.status == QpStatus::Optimal);
      CHECK(sol.objective >= prev - 1e-9);
      prev = sol.objective;
    }
  }
}

TEST_CASE("closed form for unconstrained slices") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index p = 4, n = 6, k = 2;
    const Matrix K = rnd(rng, n, p);
    const Matrix H = rnd(rng, k, p);
    const Vector y = rndv(rng, n);
    const Vector mu = rndv(rng, k);
    QpProblem pr{K, y, EqualitySlice{H, mu}, std::nullopt};
    const QpSolution s = solve_ls(pr);
    REQUIRE(s.status == QpStatus::Optimal);
    const Matrix B = K * (K.transpose() * K).inverse() * H.transpose();
    const Vector r = mu - B.transpose() * y;
    const double closed = min_unconstrained(K, y) + r.dot((B.transpose() * B).inverse() * r);
    CHECK(std::abs(s.objective - closed) <= 1e-6 * (1.0 + closed));
  }
}

TEST_CASE("infeasible slices are certified") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  int infeasible = 0;
  for (int t = 0; t < 40; ++t) {
    QpProblem pr;
    pr.K = rnd(rng, 2, 2);
    pr.y = rndv(rng, 2);
    pr.constraints = ConstraintSet::nonnegative(2);
    Matrix H(1, 2);
    H << 1, -2 + t * 0.1;
    pr.equality = EqualitySlice{H, Vector::Constant(1, -1.0)};
    const QpSolution s = solve_ls(pr);
    if (s.status != QpStatus::Infeasible) {
      CHECK(s.primal_residual < 1e-8);
      continue;
    }
    ++infeasible;
    // brute force: sample points on the line H x = mu and look for x >= 0
    int found = 0;
    for (int i = 0; i < 10000; ++i) {
      const double a = u(rng);
      Vector x(2);
      if (std::abs(H(0, 1)) > 1e-12) {
        x << a, (-1.0 - a) / H(0, 1);
      } else {
        x << -1.0, a;
      }
      if (x.minCoeff() >= 0) ++found;
    }
    CHECK(found == 0);
  }
  CHECK(infeasible > 0);
}

TEST_CASE("recession directions") {
  // toy spec: nothing, either sign, either functional
  const ConstraintSet nn = ConstraintSet::nonnegative(3);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (const int s : {1, -1})
      CHECK_FALSE(recession_direction(toy_K(), nn, toy_H().row(i).transpose(), s).direction_found);

  Matrix K(1, 2);
  K << 1, 0;
  Vector h(2);
  h << 0, 1;
  const RecessionQuery q = recession_direction(K, ConstraintSet::none(2), h, 1);
  REQUIRE(q.direction_found);
  CHECK(std::abs(q.d[1]) == doctest::Approx(1.0));
  CHECK(q.d[1] > 0);
  CHECK(std::abs(q.d[0]) < 1e-12);

  K << 1, 1;
  h << 1, -1;
  CHECK_FALSE(recession_direction(K, ConstraintSet::nonnegative(2), h, 1).direction_found);
  // kernel ray (1,-1) or (-1,1): neither lies in the orthant
  CHECK_FALSE(recession_direction(K, ConstraintSet::nonnegative(2), h, -1).direction_found);
  CHECK(recession_direction(K, ConstraintSet::none(2), h, -1).direction_found);
}

TEST_CASE("dimension errors") {
  QpProblem pr;
  pr.K = Matrix::Identity(2, 2);
  pr.y = Vector::Zero(3);
  CHECK_THROWS_AS(solve_ls(pr), Error);
}
