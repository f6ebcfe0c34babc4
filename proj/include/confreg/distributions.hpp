#pragma once

#include <cstdint>
#include <vector>

namespace confreg {

double normal_cdf(double x);
double normal_quantile(double q);

/// df = 0 is the point mass at zero.
double chi2_cdf(int df, double t);
/// Throws DomainError unless 0 < q < 1.
double chi2_quantile(int df, double q);

/// Weights indexed by degrees of freedom 0..m.
struct ChiBarMixture {
  std::vector<double> weights;

  /// Throws DomainError for negative weights or a sum away from 1.
  void validate() const;
  double atom() const { return weights.empty() ? 0.0 : weights[0]; }
};

double chibar_cdf(const ChiBarMixture& mix, double t);
/// Throws AtomError when q <= mass at zero.
double chibar_quantile(const ChiBarMixture& mix, double q);

double gap_c(double rho);

struct QuantileGapReport {
  int n = 0;
  int r = 0;
  double alpha = 0.0;
  double delta = 0.0;
  /// P(chi2_{n-r} >= delta), from the CDF.
  double p_exact_mc = 0.0;
  double p_approx = 0.0;
  /// Monte Carlo estimate of the same probability (sanity check only).
  double p_monte_carlo = 0.0;
  int mc_samples = 0;
};

QuantileGapReport quantile_gap_report(int n, int r, double alpha, int mc_samples, std::uint64_t seed);

}  // namespace confreg
