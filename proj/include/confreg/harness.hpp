#pragma once

#include "confreg/json_io.hpp"
#include "confreg/regions.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace confreg {

constexpr int kSchemaVersion = 1;

enum class MethodKind { SsbX, SsbMu, QzeroX, QzeroMu, Bonferroni, SplitNaive, SplitRefined, Custom };

const char* to_string(MethodKind m) noexcept;
MethodKind parse_method(const std::string& name);

struct MethodDescriptor {
  MethodKind kind = MethodKind::QzeroMu;
  std::string label;  // defaults to the method name
  // custom only
  TestStatistic stat = TestStatistic::Lambda1;
  double threshold = 0.0;
};

struct AreaConfig {
  bool enabled = false;
  int n_angles = 360;
  double r_tol = 1e-6;
  std::size_t n_trials = 100;  // areas on the first n_trials trials
};

struct ExperimentConfig {
  ProblemSpec spec;
  Vector x_star;
  double alpha = 0.32;
  std::size_t n_trials = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<MethodDescriptor> methods;
  CalibrationOptions calibration;
  double split_fraction = 0.5;  // alpha1 = fraction * alpha
  AreaConfig area;
  std::string output_path;

  void validate() const;
};

ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

/// A region for one observation y; built per trial by a MethodFactory.
class MethodRegion {
 public:
  virtual ~MethodRegion() = default;
  virtual bool empty() const = 0;
  virtual bool contains(const Vector& mu) const = 0;
  /// Boundary points (k = 2) used for inclusion checks; empty for boxes.
  virtual std::vector<Vector> boundary(const AreaSettings& s) const = 0;
  virtual IntervalK bounding_box() const = 0;
  virtual double area(const AreaSettings& s) const = 0;
};

/// Calibrates once, then maps y to a region.
class MethodFactory {
 public:
  virtual ~MethodFactory() = default;
  virtual std::unique_ptr<MethodRegion> build(const Vector& y) const = 0;
  virtual Json thresholds() const = 0;
  const MethodDescriptor& descriptor() const { return desc_; }

 protected:
  MethodDescriptor desc_;
};

std::unique_ptr<MethodFactory> build_method(const MethodDescriptor& d, const ProblemSpec& spec, double alpha,
                                            const CalibrationOptions& opts, double split_fraction = 0.5);

struct AreaSummary {
  std::size_t n = 0;
  double mean = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

struct MethodReport {
  std::string label;
  MethodKind kind = MethodKind::QzeroMu;
  Json threshold;
  std::size_t hits = 0;
  std::size_t empty_count = 0;
  std::size_t failure_count = 0;
  double coverage_rate = 0.0;
  double wilson_lo = 0.0, wilson_hi = 0.0;
  AreaSummary area;
  std::vector<double> areas;  // per area trial, NaN when empty or failed
  double runtime_seconds = 0.0;
};

struct InclusionReport {
  std::string inner, outer;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

struct CoverageReport {
  std::vector<MethodReport> methods;
  std::vector<InclusionReport> inclusion;
  Vector truth;
  std::size_t n_trials = 0;
  std::size_t failures = 0;
  bool flagged = false;
  std::string result_hash;

  const MethodReport& method(const std::string& label) const;
};

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

CoverageReport run_coverage(const ExperimentConfig& config);

Json to_json(const CoverageReport& r, const ExperimentConfig& c);
/// trial,method,area
std::string areas_csv(const CoverageReport& r);

}  // namespace confreg
