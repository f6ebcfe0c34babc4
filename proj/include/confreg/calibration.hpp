#pragma once

#include "confreg/distributions.hpp"
#include "confreg/problem.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace confreg {

/// Optional override of the noise draw for sample i (tests use it to force
/// eps = 0).
using NoiseHook = std::function<Vector(std::size_t index)>;

struct SamplingOptions {
  int threads = 1;
  NoiseHook noise;
};

/// n draws of the translated statistic at x with eps_i ~ N(0, I) from
/// stream (seed, i).
std::vector<double> sample_Zx(const ProblemSpec& spec, TestStatistic stat, const Vector& x, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& opts = {});

struct QuantileEstimate {
  double value = 0.0;
  double alpha = 0.0;
  std::size_t n_samples = 0;
  std::size_t order_index = 0;  // 1-based
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

/// ceil((1-alpha) n)-th order statistic; standard error from the order
/// statistics at index +- z_{0.975} sqrt(n alpha (1-alpha)).
QuantileEstimate quantile_from_samples(std::vector<double> samples, double alpha, std::uint64_t seed = 0);

/// Same, on samples that are already sorted ascending.
QuantileEstimate quantile_from_sorted(const std::vector<double>& sorted, double alpha, std::uint64_t seed = 0);

QuantileEstimate quantile_at(const ProblemSpec& spec, TestStatistic stat, const Vector& x, double alpha,
                             std::size_t n, std::uint64_t seed, const SamplingOptions& opts = {});

enum class ThresholdProvenance {
  ChiSqN,
  ChiSqRank,
  QuantileAtOrigin,
  ExtremePointMax,
  UserSupplied,
  SlicedCandidateMax,
};

const char* to_string(ThresholdProvenance p) noexcept;

enum class ThresholdMethod { Auto, Origin, Vertices, ChiSqN, ChiSqRank };

ThresholdMethod parse_threshold_method(const std::string& name);

struct ThresholdRule {
  double delta = 0.0;
  ThresholdProvenance provenance = ThresholdProvenance::UserSupplied;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  /// Point where the maximum quantile was found (extreme-point search).
  Vector argmax;
  std::size_t points_evaluated = 0;
  bool budget_exceeded = false;

  static ThresholdRule user(double delta);
};

struct CalibrationOptions {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::size_t vertex_budget = 100000;
  SamplingOptions sampling;
};

/// Auto picks Origin for cones and Vertices otherwise. Lambda2C accepts only
/// the chi-square presets (UnsupportedStatistic otherwise).
ThresholdRule global_threshold(const ProblemSpec& spec, TestStatistic stat, double alpha, ThresholdMethod method,
                               const CalibrationOptions& opts = {});

/// {(mu/h_i) e_i : mu/h_i > 0}, or {0} for mu = 0. k = 1 and NonNegative only.
std::vector<Vector> sliced_candidates_k1(const ProblemSpec& spec, double mu);

/// Max of quantile_at over sliced_candidates_k1.
ThresholdRule sliced_threshold_k1(const ProblemSpec& spec, TestStatistic stat, double mu, double alpha,
                                  const CalibrationOptions& opts = {});

struct ChiBarEstimate {
  ChiBarMixture mixture;             // indexed by degrees of freedom
  std::vector<std::size_t> face_counts;  // indexed by face dimension
  std::size_t n_samples = 0;
  std::size_t ambient_dimension = 0;  // n for Lambda1, rank(K) for Lambda2U
  bool degenerate = false;            // S = {0}
};

ChiBarEstimate estimate_chibar_weights(const ProblemSpec& spec, TestStatistic stat, std::size_t n,
                                       std::uint64_t seed, const SamplingOptions& opts = {});

/// Threshold for the one-dimensional lambda2c region at mu with noise sd
/// sigma, on the unit-variance statistic scale.
double lambda2c_1d_threshold(double mu, double sigma, double alpha);

struct BurrusCheck {
  double empirical_quantile = 0.0;
  double chi1_quantile = 0.0;
  double std_error = 0.0;
  double alpha = 0.0;
  bool exceeds = false;  // empirical > chi1 + 3 stderr
};

ProblemSpec burrus_spec();

BurrusCheck burrus_counterexample_check(double M, double alpha, std::size_t n, std::uint64_t seed,
                                        const SamplingOptions& opts = {});

/// One sampling pass, evaluated at every level in `alphas`.
std::vector<BurrusCheck> burrus_scan(double M, const std::vector<double>& alphas, std::size_t n,
                                     std::uint64_t seed, const SamplingOptions& opts = {});

}  // namespace confreg
