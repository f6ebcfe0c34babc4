#include "confreg/calibration.hpp"

#include "confreg/errors.hpp"
#include "confreg/polyhedron.hpp"
#include "confreg/qp.hpp"
#include "confreg/random.hpp"
#include "confreg/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace confreg {

const char* to_string(ThresholdProvenance p) noexcept {
  switch (p) {
    case ThresholdProvenance::ChiSqN: return "chisq_n";
    case ThresholdProvenance::ChiSqRank: return "chisq_rank";
    case ThresholdProvenance::QuantileAtOrigin: return "quantile_at_origin";
    case ThresholdProvenance::ExtremePointMax: return "extreme_point_max";
    case ThresholdProvenance::UserSupplied: return "user_supplied";
    case ThresholdProvenance::SlicedCandidateMax: return "sliced_candidate_max";
  }
  return "?";
}

ThresholdMethod parse_threshold_method(const std::string& name) {
  if (name == "auto") return ThresholdMethod::Auto;
  if (name == "origin") return ThresholdMethod::Origin;
  if (name == "vertices") return ThresholdMethod::Vertices;
  if (name == "chisq-n" || name == "chisq_n") return ThresholdMethod::ChiSqN;
  if (name == "chisq-rank" || name == "chisq_rank") return ThresholdMethod::ChiSqRank;
  throw Error(ErrorCode::UnknownMethod, "unknown calibration method '" + name + "'");
}

ThresholdRule ThresholdRule::user(double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::DomainError, "threshold must be >= 0");
  ThresholdRule r;
  r.delta = delta;
  r.provenance = ThresholdProvenance::UserSupplied;
  return r;
}

std::vector<double> sample_Zx(const ProblemSpec& spec, TestStatistic stat, const Vector& x, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& opts) {
  if (x.size() != spec.p()) throw Error(ErrorCode::DimensionMismatch, "sample_Zx: x has wrong size");
  if (spec.constraints.violation(x) > 1e-8)
    throw Error(ErrorCode::InfeasibleBasePoint, "sample_Zx: x violates the constraints");
  std::vector<double> out(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const Vector eps = opts.noise ? opts.noise(i) : standard_normal(seed, i, spec.n());
    try {
      out[i] = eval_translated(stat, spec, x, eps);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (sample " + std::to_string(i) + ")");
    }
  });
  return out;
}

QuantileEstimate quantile_from_sorted(const std::vector<double>& sorted, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "quantile: alpha outside (0,1)");
  const std::size_t n = sorted.size();
  if (n == 0) throw Error(ErrorCode::DomainError, "quantile: no samples");
  QuantileEstimate q;
  q.alpha = alpha;
  q.n_samples = n;
  q.seed = seed;
  const double target = (1.0 - alpha) * static_cast<double>(n);
  // guard against 0.68 * 1e5 landing a hair above an integer
  auto idx = static_cast<std::size_t>(std::ceil(target - 1e-9 * target));
  idx = std::clamp<std::size_t>(idx, 1, n);
  q.order_index = idx;
  q.value = sorted[idx - 1];
  const double z = normal_quantile(0.975);
  const double half = z * std::sqrt(static_cast<double>(n) * alpha * (1.0 - alpha));
  const auto lo = static_cast<std::size_t>(std::clamp(std::floor(static_cast<double>(idx) - half), 1.0, double(n)));
  const auto hi = static_cast<std::size_t>(std::clamp(std::ceil(static_cast<double>(idx) + half), 1.0, double(n)));
  q.std_error = (sorted[hi - 1] - sorted[lo - 1]) / (2.0 * z);
  return q;
}

QuantileEstimate quantile_from_samples(std::vector<double> samples, double alpha, std::uint64_t seed) {
  std::sort(samples.begin(), samples.end());
  return quantile_from_sorted(samples, alpha, seed);
}

QuantileEstimate quantile_at(const ProblemSpec& spec, TestStatistic stat, const Vector& x, double alpha,
                             std::size_t n, std::uint64_t seed, const SamplingOptions& opts) {
  if (n < 1000) throw Error(ErrorCode::DomainError, "quantile_at: need at least 1000 samples");
  return quantile_from_samples(sample_Zx(spec, stat, x, n, seed, opts), alpha, seed);
}

namespace {

ThresholdRule from_estimate(const QuantileEstimate& q, ThresholdProvenance prov, const Vector& at) {
  ThresholdRule r;
  r.delta = q.value;
  r.provenance = prov;
  r.std_error = q.std_error;
  r.n_samples = q.n_samples;
  r.argmax = at;
  r.points_evaluated = 1;
  return r;
}

}  // namespace

ThresholdRule global_threshold(const ProblemSpec& spec, TestStatistic stat, double alpha, ThresholdMethod method,
                               const CalibrationOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "threshold: alpha outside (0,1)");
  ThresholdRule r;
  switch (method) {
    case ThresholdMethod::ChiSqN:
      r.delta = chi2_quantile(static_cast<int>(spec.n()), 1.0 - alpha);
      r.provenance = ThresholdProvenance::ChiSqN;
      return r;
    case ThresholdMethod::ChiSqRank:
      r.delta = chi2_quantile(static_cast<int>(rank(spec.K)), 1.0 - alpha);
      r.provenance = ThresholdProvenance::ChiSqRank;
      return r;
    default:
      break;
  }
  if (stat == TestStatistic::Lambda2C)
    throw Error(ErrorCode::UnsupportedStatistic,
                "no optimal global threshold is known for lambda2c; use a chi-square preset");
  if (method == ThresholdMethod::Auto)
    method = spec.constraints.is_cone() ? ThresholdMethod::Origin : ThresholdMethod::Vertices;
  if (method == ThresholdMethod::Origin) {
    if (!spec.constraints.is_cone())
      throw Error(ErrorCode::UnsupportedConstraint, "origin calibration needs a cone constraint set");
    const Vector x0 = Vector::Zero(spec.p());
    return from_estimate(quantile_at(spec, stat, x0, alpha, opts.n_samples, opts.seed, opts.sampling),
                         ThresholdProvenance::QuantileAtOrigin, x0);
  }
  const Inequalities in = spec.constraints.inequalities();
  const VertexEnumeration ve = enumerate_vertices(in.G, in.g, opts.vertex_budget);
  if (ve.vertices.empty()) {
    if (ve.budget_exceeded) throw Error(ErrorCode::VertexBudgetExceeded, "vertex budget exhausted before any vertex");
    throw Error(ErrorCode::InfeasibleSpec, "constraint set has no extreme point");
  }
  ThresholdRule best;
  best.delta = -1.0;
  for (const Vector& v : ve.vertices) {
    // common random numbers across vertices
    const QuantileEstimate q = quantile_at(spec, stat, v, alpha, opts.n_samples, opts.seed, opts.sampling);
    if (q.value > best.delta) best = from_estimate(q, ThresholdProvenance::ExtremePointMax, v);
  }
  best.points_evaluated = ve.vertices.size();
  best.budget_exceeded = ve.budget_exceeded;
  return best;
}

std::vector<Vector> sliced_candidates_k1(const ProblemSpec& spec, double mu) {
  if (spec.k() != 1) throw Error(ErrorCode::UnsupportedConstraint, "sliced candidates: need k = 1");
  if (spec.constraints.kind() != "nonnegative")
    throw Error(ErrorCode::UnsupportedConstraint, "sliced candidates: need non-negativity constraints");
  const Eigen::Index p = spec.p();
  std::vector<Vector> out;
  if (mu == 0.0) {
    out.push_back(Vector::Zero(p));
    return out;
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = spec.H(0, i);
    if (h != 0.0 && mu / h > 0) {
      Vector v = Vector::Zero(p);
      v[i] = mu / h;
      out.push_back(v);
    }
  }
  return out;
}

ThresholdRule sliced_threshold_k1(const ProblemSpec& spec, TestStatistic stat, double mu, double alpha,
                                  const CalibrationOptions& opts) {
  const std::vector<Vector> cands = sliced_candidates_k1(spec, mu);
  if (cands.empty()) throw Error(ErrorCode::EmptyRegion, "sliced threshold: slice is empty");
  ThresholdRule best;
  best.delta = -1.0;
  for (const Vector& c : cands) {
    const QuantileEstimate q = quantile_at(spec, stat, c, alpha, opts.n_samples, opts.seed, opts.sampling);
    if (q.value > best.delta) best = from_estimate(q, ThresholdProvenance::SlicedCandidateMax, c);
  }
  best.points_evaluated = cands.size();
  return best;
}

ChiBarEstimate estimate_chibar_weights(const ProblemSpec& spec, TestStatistic stat, std::size_t n,
                                       std::uint64_t seed, const SamplingOptions& opts) {
  if (stat == TestStatistic::Lambda2C)
    throw Error(ErrorCode::UnsupportedStatistic, "chi-bar weights: lambda1 or lambda2u only");
  if (!spec.constraints.is_cone())
    throw Error(ErrorCode::UnsupportedConstraint, "chi-bar weights: cone constraints only");
  if (n == 0) throw Error(ErrorCode::DomainError, "chi-bar weights: no samples");
  const Eigen::Index p = spec.p();
  const Matrix G = spec.constraints.inequalities().G;
  const std::size_t ambient = stat == TestStatistic::Lambda1 ? static_cast<std::size_t>(spec.n()) : rank(spec.K);
  ChiBarEstimate est;
  est.n_samples = n;
  est.ambient_dimension = ambient;
  const std::size_t smax = image_cone_dimension(spec.K, spec.H, G);
  est.face_counts.assign(ambient + 1, 0);
  if (smax == 0) {
    est.degenerate = true;
    est.face_counts[0] = n;
  } else {
    std::vector<std::size_t> dims(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
      const Vector eps = opts.noise ? opts.noise(i) : standard_normal(seed, i, spec.n());
      LsqSystem s{spec.K, eps, spec.H, Vector::Zero(spec.k()), G, Vector::Zero(G.rows())};
      const QpSolution sol = solve_lsq(s);
      if (sol.status != QpStatus::Optimal) throw Error(ErrorCode::IterationLimit, "chi-bar weights: projection failed");
      const double tol = 1e-7 * (1.0 + (sol.lambda.size() ? sol.lambda.lpNorm<Eigen::Infinity>() : 0.0));
      std::vector<Eigen::Index> tight;
      for (Eigen::Index j = 0; j < sol.lambda.size(); ++j)
        if (sol.lambda[j] > tol) tight.push_back(j);
      Matrix E(spec.k() + static_cast<Eigen::Index>(tight.size()), p);
      if (spec.k() > 0) E.topRows(spec.k()) = spec.H;
      for (std::size_t t = 0; t < tight.size(); ++t) E.row(spec.k() + static_cast<Eigen::Index>(t)) = G.row(tight[t]);
      dims[i] = image_cone_dimension(spec.K, E, G);
    });
    for (const std::size_t d : dims) ++est.face_counts[std::min(d, ambient)];
  }
  est.mixture.weights.assign(ambient + 1, 0.0);
  for (std::size_t k = 0; k <= ambient; ++k)
    est.mixture.weights[ambient - k] = static_cast<double>(est.face_counts[k]) / static_cast<double>(n);
  return est;
}

double lambda2c_1d_threshold(double mu, double sigma, double alpha) {
  if (!(mu >= 0.0) || !(sigma > 0.0)) throw Error(ErrorCode::DomainError, "lambda2c threshold: need mu >= 0, sigma > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "lambda2c threshold: alpha outside (0,1)");
  const double m = mu / sigma;
  const double q1 = chi2_quantile(1, 1.0 - alpha);
  if (1.0 - alpha < chi2_cdf(1, m * m)) return q1;
  auto f = [&](double x) {
    const double second = m > 0 ? normal_cdf((-m * m - x) / (2.0 * m)) : 0.0;
    return normal_cdf(std::sqrt(x)) - second - (1.0 - alpha);
  };
  double lo = 0.0, hi = 10.0 * q1 + m * m;
  double flo = f(lo), fhi = f(hi);
  if (flo > 0 || fhi < 0) throw Error(ErrorCode::BracketError, "lambda2c threshold: no sign change in bracket");
  for (int it = 0; it < 300 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm < 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

ProblemSpec burrus_spec() {
  ProblemSpec s;
  s.K = Matrix::Identity(2, 2);
  s.H = Matrix(1, 2);
  s.H << 1, -1;
  s.constraints = ConstraintSet::nonnegative(2);
  return s;
}

std::vector<BurrusCheck> burrus_scan(double M, const std::vector<double>& alphas, std::size_t n, std::uint64_t seed,
                                     const SamplingOptions& opts) {
  if (!(M >= 0.0)) throw Error(ErrorCode::DomainError, "burrus: M must be >= 0");
  const ProblemSpec spec = burrus_spec();
  Vector x(2);
  x << 0.0, M;
  std::vector<double> z = sample_Zx(spec, TestStatistic::Lambda2C, x, n, seed, opts);
  std::sort(z.begin(), z.end());
  std::vector<BurrusCheck> out;
  for (const double a : alphas) {
    const QuantileEstimate q = quantile_from_sorted(z, a, seed);
    BurrusCheck c;
    c.alpha = a;
    c.empirical_quantile = q.value;
    c.std_error = q.std_error;
    c.chi1_quantile = chi2_quantile(1, 1.0 - a);
    c.exceeds = c.empirical_quantile > c.chi1_quantile + 3.0 * c.std_error;
    out.push_back(c);
  }
  return out;
}

BurrusCheck burrus_counterexample_check(double M, double alpha, std::size_t n, std::uint64_t seed,
                                        const SamplingOptions& opts) {
  return burrus_scan(M, {alpha}, n, seed, opts).front();
}

}  // namespace confreg
