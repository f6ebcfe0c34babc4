// One line per acceptance criterion; nonzero exit when any fails.

#include "confreg/calibration.hpp"
#include "confreg/distributions.hpp"
#include "confreg/errors.hpp"
#include "confreg/harness.hpp"
#include "confreg/linalg.hpp"
#include "confreg/qp.hpp"
#include "confreg/random.hpp"
#include "confreg/regions.hpp"
#include "confreg/statistics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace confreg;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Matrix rnd(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

Vector rndv(std::mt19937_64& rng, Eigen::Index n) { return rnd(rng, n, 1).col(0); }

Vector uniform_nonneg(std::mt19937_64& rng, Eigen::Index n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

ProblemSpec toy_spec() {
  ProblemSpec s;
  s.K = Matrix(2, 3);
  s.K << 2, 1, 1, 0, 1, 1;
  s.H = Matrix(2, 3);
  s.H << 1, -1, 0, 0, 1, -1;
  s.constraints = ConstraintSet::nonnegative(3);
  return s;
}

// Asymptotic Kolmogorov p-value with the Stephens correction.
double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// --- 1 ---------------------------------------------------------------------
void calibration_constants(Outcome& o) {
  const double c68 = chi2_quantile(2, 0.68), c95 = chi2_quantile(2, 0.95);
  o.detail << " chi2_2: " << c68 << " " << c95;
  o.require(close(c68, 2.279, 5e-4) && close(c95, 5.991, 5e-4), "chi2_2 quantiles");

  const ChiBarMixture mix{{0.0, 0.5, 0.5}};
  const double m68 = chibar_quantile(mix, 0.68), m95 = chibar_quantile(mix, 0.95);
  o.detail << "; mixture: " << m68 << " " << m95 << " (printed 1.644 5.139)";
  o.require(close(m68, 1.644, 5e-4), "mixture 0.68 vs 1.644 off by " + std::to_string(m68 - 1.644));
  o.require(close(m95, 5.139, 5e-4), "mixture 0.95 vs 5.139 off by " + std::to_string(m95 - 5.139));

  const ProblemSpec s = toy_spec();
  const Vector zero = Vector::Zero(3);
  const QuantileEstimate q68 = quantile_at(s, TestStatistic::Lambda1, zero, 0.32, 100000, 101);
  const QuantileEstimate q95 = quantile_at(s, TestStatistic::Lambda1, zero, 0.05, 100000, 101);
  o.detail << "; MC: " << q68.value << " " << q95.value;
  o.require(close(q68.value, 1.644, 0.05), "MC 0.68");
  o.require(close(q95.value, 5.139, 0.15), "MC 0.95");
}

// --- 2 ---------------------------------------------------------------------
void exact_null_laws(Outcome& o) {
  std::mt19937_64 rng(2);
  const Eigen::Index n = 5, p = 4, R = 3, k = 2;
  for (int t = 0; t < 3; ++t) {
    ProblemSpec s;
    s.K = rnd(rng, n, R) * rnd(rng, R, p);
    s.H = rnd(rng, k, n) * s.K;
    s.constraints = ConstraintSet::none(p);
    const int r = static_cast<int>(rank(s.H));
    const int rk = static_cast<int>(rank(s.K));
    const Vector x = rndv(rng, p);
    const auto u = sample_Zx(s, TestStatistic::Lambda2U, x, 10000, 200 + t);
    const auto one = sample_Zx(s, TestStatistic::Lambda1, x, 10000, 300 + t);
    const double pu = ks_pvalue(u, [r](double v) { return chi2_cdf(r, v); });
    const double p1 = ks_pvalue(one, [&](double v) { return chi2_cdf(static_cast<int>(n) - rk + r, v); });
    o.detail << " spec" << t << "(R=" << rk << ",r=" << r << "): p_l2u=" << pu << " p_l1=" << p1 << ";";
    o.require(rk == R && r == k, "ranks");
    o.require(pu > 0.01, "KS l2u");
    o.require(p1 > 0.01, "KS l1");
  }
}

// --- 3 ---------------------------------------------------------------------
void dominance_chain(Outcome& o) {
  std::mt19937_64 rng(3);
  std::vector<ProblemSpec> specs{toy_spec()};
  for (int t = 0; t < 4; ++t) {
    ProblemSpec s;
    const Eigen::Index p = 2 + t, n = 2 + (t + 1) % 3;
    s.K = rnd(rng, n, p);
    s.H = rnd(rng, 1 + t % 2, p);
    s.constraints = ConstraintSet::nonnegative(p);
    specs.push_back(s);
  }
  std::size_t violations = 0, checked = 0;
  for (std::size_t si = 0; si < specs.size(); ++si) {
    const ProblemSpec& s = specs[si];
    const Vector x = uniform_nonneg(rng, s.p(), 2.0);
    for (std::size_t i = 0; i < 2000; ++i) {
      const Vector eps = standard_normal(33, si * 2000 + i, s.n());
      const double c = eval_translated(TestStatistic::Lambda2C, s, x, eps);
      const double u = eval_translated(TestStatistic::Lambda2U, s, x, eps);
      const double one = eval_translated(TestStatistic::Lambda1, s, x, eps);
      const double e2 = eps.squaredNorm();
      const double tol = 1e-7 * (1.0 + e2);
      ++checked;
      if (c > u + tol || u > one + tol || one > e2 + tol) ++violations;
    }
  }
  o.detail << " samples=" << checked << " violations=" << violations;
  o.require(violations == 0, "chain violated");
}

// --- 4 and 5 ---------------------------------------------------------------
ExperimentConfig toy_experiment(const Vector& x_star, std::size_t n_trials) {
  ExperimentConfig c;
  c.spec = toy_spec();
  c.x_star = x_star;
  c.alpha = 0.32;
  c.n_trials = n_trials;
  c.seed = 4;
  c.threads = 0;
  for (MethodKind m : {MethodKind::SsbX, MethodKind::SsbMu, MethodKind::QzeroX, MethodKind::QzeroMu,
                       MethodKind::Bonferroni, MethodKind::SplitNaive, MethodKind::SplitRefined}) {
    MethodDescriptor d;
    d.kind = m;
    d.label = to_string(m);
    c.methods.push_back(d);
  }
  c.calibration.n_samples = 100000;
  c.calibration.seed = 5;
  c.area.enabled = true;
  c.area.n_trials = 200;
  c.area.n_angles = 180;
  return c;
}

struct CoverageRuns {
  CoverageReport zero, far;
};

void coverage(const CoverageRuns& runs, Outcome& o) {
  const double qz = runs.zero.method("qzero_mu").coverage_rate;
  o.detail << " x*=0:";
  for (const auto& m : runs.zero.methods) {
    o.detail << " " << m.label << "=" << m.coverage_rate;
    o.require(m.coverage_rate >= 0.66, m.label + " below 0.66 at x*=0");
  }
  o.detail << "; x*=(5,5,5):";
  for (const auto& m : runs.far.methods) {
    o.detail << " " << m.label << "=" << m.coverage_rate;
    o.require(m.coverage_rate >= 0.66, m.label + " below 0.66 at x*=5");
  }
  o.require(close(qz, 0.68, 0.02), "qzero_mu at x*=0");
  o.require(runs.far.method("qzero_mu").coverage_rate >= 0.70, "qzero_mu at x*=5 below 0.70");
  o.require(!runs.zero.flagged && !runs.far.flagged, "flagged run");
}

void area_ordering(const CoverageRuns& runs, Outcome& o) {
  const std::pair<const char*, const CoverageReport*> settings[] = {{"0", &runs.zero}, {"(5,5,5)", &runs.far}};
  for (const auto& [name, r] : settings) {
    const double a = r->method("qzero_mu").area.mean, b = r->method("ssb_mu").area.mean,
                 c = r->method("ssb_x").area.mean;
    o.detail << " x*=" << name << ": qzero_mu=" << a << " ssb_mu=" << b << " ssb_x=" << c << ";";
    o.require(a < b && b < c, "area order");
    for (const auto& inc : r->inclusion) {
      o.detail << " " << inc.inner << "<=" << inc.outer << " " << inc.checked - inc.violations << "/"
               << inc.checked << ";";
      o.require(inc.checked > 0 && inc.violations == 0, "inclusion " + inc.inner);
    }
  }
}

// --- 6 ---------------------------------------------------------------------
void chibar_and_split(Outcome& o) {
  ProblemSpec ray;
  ray.K = Matrix(2, 1);
  ray.K << 1, 0;
  ray.H = Matrix::Zero(1, 1);
  ray.constraints = ConstraintSet::nonnegative(1);
  const ChiBarEstimate e = estimate_chibar_weights(ray, TestStatistic::Lambda2U, 10000, 6);
  o.detail << " weights=(" << e.mixture.weights[0] << "," << e.mixture.weights[1] << ")";
  o.require(e.mixture.weights.size() == 2 && close(e.mixture.weights[0], 0.5, 0.02) &&
                close(e.mixture.weights[1], 0.5, 0.02),
            "weights");

  const ProblemSpec s = toy_spec();
  const SplitMatrices m = row_null_split(s.K, s.H);
  Matrix Hpar(2, 3), Hperp(2, 3), Sig(2, 2);
  Hpar << 1, -0.5, -0.5, 0, 0, 0;
  Hperp << 0, -0.5, 0.5, 0, 1, -1;
  Sig << 1.25, 0, 0, 0;
  const double err = std::max({(m.H_parallel - Hpar).cwiseAbs().maxCoeff(),
                               (m.H_perp - Hperp).cwiseAbs().maxCoeff(),
                               (m.Sigma_parallel - Sig).cwiseAbs().maxCoeff()});
  o.detail << "; split max error=" << err;
  o.require(err < 1e-12, "split matrices");
}

// --- 7 ---------------------------------------------------------------------
void boundedness(Outcome& o) {
  ProblemSpec s = toy_spec();
  const auto with = boundedness_report(s);
  s.constraints = ConstraintSet::none(3);
  const auto without = boundedness_report(s);
  o.detail << " constrained: " << to_string(with[0]) << "," << to_string(with[1]) << "; free: "
           << to_string(without[0]) << "," << to_string(without[1]);
  for (auto b : with) o.require(b == BoundKind::Finite, "constrained not finite");
  for (auto b : without) o.require(b == BoundKind::Unbounded, "free not unbounded");
}

// --- 8 ---------------------------------------------------------------------
void burrus(Outcome& o) {
  std::vector<double> alphas;
  for (int i = 1; i <= 50; ++i) alphas.push_back(i / 100.0);
  const auto scan = burrus_scan(50.0, alphas, 1000000, 8);
  std::size_t hits = 0;
  double best = -1e300, best_alpha = 0.0;
  for (const auto& c : scan) {
    if (c.exceeds) ++hits;
    const double z = (c.empirical_quantile - c.chi1_quantile) / c.std_error;
    if (z > best) {
      best = z;
      best_alpha = c.alpha;
    }
  }
  // The population excess at alpha = 0.01 is about 0.051, i.e. roughly 2.9 stderr at this N.
  o.detail << " levels exceeding=" << hits << "/" << scan.size() << " largest excess=" << best
           << " stderr at alpha=" << best_alpha;
  o.require(hits >= 1, "no level exceeds");
}

// --- 9 ---------------------------------------------------------------------
void quantile_structure(Outcome& o) {
  std::mt19937_64 rng(9);
  const std::size_t N = 4000;
  const double alpha = 0.1;
  for (TestStatistic stat : {TestStatistic::Lambda1, TestStatistic::Lambda2U}) {
    int mono_ok = 0, conv_ok = 0;
    for (int t = 0; t < 20; ++t) {
      ProblemSpec s;
      const Eigen::Index p = 2 + t % 2, n = 2 + (t / 2) % 2;
      s.K = rnd(rng, n, p);
      s.H = rnd(rng, 1, n) * s.K;
      s.constraints = ConstraintSet::nonnegative(p);
      const std::uint64_t seed = 900 + t;

      const Vector x = uniform_nonneg(rng, p, 1.5);
      const Vector d = uniform_nonneg(rng, p, 1.5);
      const auto qx = quantile_at(s, stat, x, alpha, N, seed);
      const auto qxd = quantile_at(s, stat, x + d, alpha, N, seed);
      if (qxd.value <= qx.value + 2.0 * (qx.std_error + qxd.std_error)) ++mono_ok;

      const Vector a = uniform_nonneg(rng, p, 1.5), b = uniform_nonneg(rng, p, 1.5);
      const auto qa = quantile_at(s, stat, a, alpha, N, seed);
      const auto qb = quantile_at(s, stat, b, alpha, N, seed);
      const auto qm = quantile_at(s, stat, 0.5 * (a + b), alpha, N, seed);
      const double tol = 2.0 * (qm.std_error + 0.5 * (qa.std_error + qb.std_error));
      if (qm.value <= 0.5 * (qa.value + qb.value) + tol) ++conv_ok;
    }
    o.detail << " " << to_string(stat) << ": monotone " << mono_ok << "/20 convex " << conv_ok << "/20;";
    o.require(mono_ok == 20, std::string(to_string(stat)) + " monotonicity");
    o.require(conv_ok == 20, std::string(to_string(stat)) + " convexity");
  }
}

// --- 10 --------------------------------------------------------------------
void solver_correctness(Outcome& o) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> pick(2, 8);
  double worst = 0.0;
  int bad = 0;
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
    const double scale = 1.0 + s.K.squaredNorm() * (1.0 + sol.x.norm());
    const double r = std::max({sol.primal_residual, sol.dual_residual / scale, sol.complementarity});
    worst = std::max(worst, r);
    if (sol.status != QpStatus::Optimal || r > 1e-6 || sol.lambda.size() > 0 && sol.lambda.minCoeff() < 0.0) ++bad;
  }
  o.detail << " random QPs: worst KKT residual=" << worst << " bad=" << bad;
  o.require(bad == 0, "KKT");

  double worst_cf = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index p = 4, n = 6, k = 2;
    const Matrix K = rnd(rng, n, p);
    const Matrix H = rnd(rng, k, p);
    const Vector y = rndv(rng, n);
    const Vector mu = rndv(rng, k);
    const QpSolution s = solve_ls(QpProblem{K, y, EqualitySlice{H, mu}, std::nullopt});
    const Matrix B = b_matrix(K, H);
    const Vector r = mu - B.transpose() * y;
    const double closed = min_unconstrained(K, y) + r.dot((B.transpose() * B).ldlt().solve(r));
    worst_cf = std::max(worst_cf, std::abs(s.objective - closed) / (1.0 + closed));
  }
  o.detail << "; closed form: worst relative gap=" << worst_cf;
  o.require(worst_cf <= 1e-6, "closed form");
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](int id, const std::function<void(Outcome&)>& f) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      f(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s%s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
  };

  run(1, calibration_constants);
  run(2, exact_null_laws);
  run(3, dominance_chain);

  CoverageRuns runs;
  bool runs_ok = true;
  std::string run_error;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    runs.zero = run_coverage(toy_experiment(Vector::Zero(3), 20000));
    runs.far = run_coverage(toy_experiment(Vector::Constant(3, 5.0), 20000));
  } catch (const std::exception& e) {
    runs_ok = false;
    run_error = e.what();
  }
  std::printf("coverage runs took %.1fs\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  run(4, [&](Outcome& o) {
    if (!runs_ok) throw std::runtime_error(run_error);
    coverage(runs, o);
  });
  run(5, [&](Outcome& o) {
    if (!runs_ok) throw std::runtime_error(run_error);
    area_ordering(runs, o);
  });

  run(6, chibar_and_split);
  run(7, boundedness);
  run(8, burrus);
  run(9, quantile_structure);
  run(10, solver_correctness);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
