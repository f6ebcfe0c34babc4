#include "confreg/distributions.hpp"

#include "confreg/errors.hpp"
#include "confreg/random.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace confreg {

double normal_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::DomainError, "normal_quantile: q outside (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

double chi2_cdf(int df, double t) {
  if (df < 0) throw Error(ErrorCode::DomainError, "chi2_cdf: negative degrees of freedom");
  if (std::isnan(t)) throw Error(ErrorCode::DomainError, "chi2_cdf: NaN argument");
  if (t < 0) return 0.0;
  if (df == 0) return 1.0;
  if (std::isinf(t)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * t);
}

double chi2_quantile(int df, double q) {
  if (df < 0) throw Error(ErrorCode::DomainError, "chi2_quantile: negative degrees of freedom");
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::DomainError, "chi2_quantile: q outside (0,1)");
  if (df == 0) return 0.0;
  return 2.0 * boost::math::gamma_p_inv(0.5 * df, q);
}

void ChiBarMixture::validate() const {
  if (weights.empty()) throw Error(ErrorCode::DomainError, "chi-bar: no weights");
  double s = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::DomainError, "chi-bar: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorCode::DomainError, "chi-bar: weights do not sum to 1");
}

double chibar_cdf(const ChiBarMixture& mix, double t) {
  mix.validate();
  if (t < 0) return 0.0;
  double c = 0.0;
  for (std::size_t j = 0; j < mix.weights.size(); ++j) {
    if (mix.weights[j] > 0) c += mix.weights[j] * chi2_cdf(static_cast<int>(j), t);
  }
  return std::min(1.0, c);
}

double chibar_quantile(const ChiBarMixture& mix, double q) {
  mix.validate();
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::DomainError, "chibar_quantile: q outside (0,1)");
  if (q <= mix.atom()) throw Error(ErrorCode::AtomError, "chibar_quantile: level inside the atom at zero");
  double hi = 0.0;
  for (std::size_t j = 1; j < mix.weights.size(); ++j) {
    if (mix.weights[j] > 0) hi = std::max(hi, chi2_quantile(static_cast<int>(j), q));
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chibar_cdf(mix, mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gap_c(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::DomainError, "c(rho): rho outside [0,1)");
  return (1.0 - std::sqrt(rho)) / std::sqrt(1.0 - rho);
}

QuantileGapReport quantile_gap_report(int n, int r, double alpha, int mc_samples, std::uint64_t seed) {
  if (r < 1 || r >= n) throw Error(ErrorCode::DomainError, "quantile gap: need 1 <= r < n");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::DomainError, "quantile gap: alpha outside (0,1)");
  if (mc_samples < 0) throw Error(ErrorCode::DomainError, "quantile gap: negative sample count");
  QuantileGapReport rep;
  rep.n = n;
  rep.r = r;
  rep.alpha = alpha;
  rep.delta = chi2_quantile(n, 1 - alpha) - chi2_quantile(r, 1 - alpha);
  rep.p_exact_mc = 1.0 - chi2_cdf(n - r, rep.delta);
  const double rho = static_cast<double>(r) / n;
  rep.p_approx = 1.0 - normal_cdf(normal_quantile(1 - alpha) * gap_c(rho));
  rep.mc_samples = mc_samples;
  if (mc_samples > 0) {
    std::chi_squared_distribution<double> chi(n - r);
    int hits = 0;
    for (int i = 0; i < mc_samples; ++i) {
      SplitMix64 eng(stream_seed(seed, static_cast<std::uint64_t>(i)));
      chi.reset();
      if (chi(eng) >= rep.delta) ++hits;
    }
    rep.p_monte_carlo = static_cast<double>(hits) / mc_samples;
  }
  return rep;
}

}  // namespace confreg
