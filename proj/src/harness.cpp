#include "confreg/harness.hpp"

#include "confreg/errors.hpp"
#include "confreg/qp.hpp"
#include "confreg/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace confreg {

namespace {

constexpr std::uint64_t kTrialSalt = 0x636f766572ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ProblemSpec row_spec(const ProblemSpec& spec, Eigen::Index i) {
  ProblemSpec s;
  s.K = spec.K;
  s.H = spec.H.row(i);
  s.constraints = spec.constraints;
  return s;
}

double fit_objective(const ProblemSpec& spec, const Vector& y) {
  const QpSolution s = solve_ls(QpProblem{spec.K, y, std::nullopt, spec.constraints});
  if (s.status != QpStatus::Optimal) throw Error(ErrorCode::IterationLimit, "constrained fit failed");
  return s.objective;
}

// Product of per-row profile intervals {phi : L_i(phi) <= delta_i}.
class BoxRegion : public MethodRegion {
 public:
  BoxRegion(const ProblemSpec& spec, Vector y, std::vector<double> deltas)
      : spec_(spec), y_(std::move(y)), deltas_(std::move(deltas)) {
    fit_ = fit_objective(spec_, y_);
  }

  bool empty() const override {
    return fit_ > *std::min_element(deltas_.begin(), deltas_.end()) + 1e-9;
  }

  bool contains(const Vector& mu) const override {
    if (empty()) return false;
    for (Eigen::Index i = 0; i < spec_.k(); ++i) {
      const SliceValue sv = slice_optimum(row_spec(spec_, i), mu.segment(i, 1), y_);
      if (!sv.feasible || sv.value > deltas_[static_cast<std::size_t>(i)] + 1e-9) return false;
    }
    return true;
  }

  std::vector<Vector> boundary(const AreaSettings&) const override { return {}; }

  IntervalK bounding_box() const override {
    IntervalK box;
    for (Eigen::Index i = 0; i < spec_.k(); ++i)
      box.intervals.push_back(
          profile_roots(spec_, y_, 0.0, deltas_[static_cast<std::size_t>(i)], spec_.H.row(i).transpose()));
    return box;
  }

  double area(const AreaSettings&) const override { return bounding_box().volume(); }

 private:
  const ProblemSpec& spec_;
  Vector y_;
  std::vector<double> deltas_;
  double fit_ = 0.0;
};

class MuRegion : public MethodRegion {
 public:
  explicit MuRegion(RegionSpec r) : region_(std::move(r)) {}

  bool empty() const override { return region_.empty(); }
  bool contains(const Vector& mu) const override { return region_.contains(mu); }

  std::vector<Vector> boundary(const AreaSettings& s) const override {
    ensure_boundary(s);
    std::vector<Vector> out;
    for (const BoundaryPoint& b : boundary_) out.push_back(b.mu);
    return out;
  }

  IntervalK bounding_box() const override { return confreg::bounding_box(region_.spec()); }

  double area(const AreaSettings& s) const override {
    ensure_boundary(s);
    return polar_area(boundary_);
  }

 private:
  void ensure_boundary(const AreaSettings& s) const {
    if (static_cast<int>(boundary_.size()) != s.n_angles) boundary_ = region_boundary(region_, s);
  }

  Region region_;
  mutable std::vector<BoundaryPoint> boundary_;
};

class SplitMethodRegion : public MethodRegion {
 public:
  explicit SplitMethodRegion(SplitRegion sr) : sr_(std::move(sr)) {
    fit_ = fit_objective(sr_.perp.spec, sr_.perp.y);
  }

  bool empty() const override { return fit_ > sr_.perp.threshold.delta + 1e-9; }
  bool contains(const Vector& mu) const override { return !empty() && split_contains(sr_, mu); }
  std::vector<Vector> boundary(const AreaSettings&) const override { return {}; }

  IntervalK bounding_box() const override {
    IntervalK box;
    const Eigen::Index k = sr_.perp.spec.k();
    for (Eigen::Index i = 0; i < k; ++i) {
      const Vector e = Vector::Unit(k, i);
      box.intervals.push_back(Interval{-split_support(sr_, -e), split_support(sr_, e)});
    }
    return box;
  }

  double area(const AreaSettings& s) const override { return split_area(sr_, s.n_angles); }

 private:
  SplitRegion sr_;
  double fit_ = 0.0;
};

class BoxFactory : public MethodFactory {
 public:
  BoxFactory(const MethodDescriptor& d, const ProblemSpec& spec, std::vector<ThresholdRule> rules)
      : spec_(spec), rules_(std::move(rules)) {
    desc_ = d;
    for (Eigen::Index i = 0; i < spec.k(); ++i)
      deltas_.push_back(rules_[rules_.size() == 1 ? 0 : static_cast<std::size_t>(i)].delta);
  }

  std::unique_ptr<MethodRegion> build(const Vector& y) const override {
    return std::make_unique<BoxRegion>(spec_, y, deltas_);
  }

  Json thresholds() const override {
    if (rules_.size() == 1 || desc_.kind != MethodKind::Bonferroni) return to_json(rules_.front());
    Json rows = Json::array();
    for (const ThresholdRule& r : rules_) rows.push_back(to_json(r));
    return {{"per_row", rows}};
  }

 private:
  ProblemSpec spec_;
  std::vector<ThresholdRule> rules_;
  std::vector<double> deltas_;
};

class MuFactory : public MethodFactory {
 public:
  MuFactory(const MethodDescriptor& d, const ProblemSpec& spec, TestStatistic stat, ThresholdRule rule)
      : spec_(spec), stat_(stat), rule_(std::move(rule)) {
    desc_ = d;
  }

  std::unique_ptr<MethodRegion> build(const Vector& y) const override {
    return std::make_unique<MuRegion>(RegionSpec{spec_, stat_, rule_, y});
  }

  Json thresholds() const override {
    Json j = to_json(rule_);
    j["statistic"] = to_string(stat_);
    return j;
  }

 private:
  ProblemSpec spec_;
  TestStatistic stat_;
  ThresholdRule rule_;
};

class SplitFactory : public MethodFactory {
 public:
  SplitFactory(const MethodDescriptor& d, const ProblemSpec& spec, double alpha, double fraction,
               const CalibrationOptions& opts)
      : spec_(spec), a1_(fraction * alpha), a2_((1.0 - fraction) * alpha) {
    desc_ = d;
    const SplitRegion tmpl =
        split_region_build(spec, Vector::Zero(spec.n()), a1_, a2_,
                           d.kind == MethodKind::SplitNaive ? PerpThreshold::Naive : PerpThreshold::Refined, opts);
    perp_ = tmpl.perp.threshold;
    radius2_ = tmpl.parallel.radius2;
  }

  std::unique_ptr<MethodRegion> build(const Vector& y) const override {
    return std::make_unique<SplitMethodRegion>(split_region_build(spec_, y, a1_, a2_, perp_));
  }

  Json thresholds() const override {
    return {{"alpha1", a1_}, {"alpha2", a2_}, {"parallel_radius2", radius2_}, {"perp", to_json(perp_)}};
  }

 private:
  ProblemSpec spec_;
  double a1_, a2_;
  ThresholdRule perp_;
  double radius2_ = 0.0;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

AreaSummary summarize(const std::vector<double>& areas) {
  std::vector<double> v;
  for (double a : areas)
    if (std::isfinite(a)) v.push_back(a);
  AreaSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double a : v) sum += a;
  s.mean = sum / static_cast<double>(v.size());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
  };
  s.q25 = q(0.25);
  s.q50 = q(0.5);
  s.q75 = q(0.75);
  return s;
}

Json area_json(const AreaSummary& a) {
  if (a.n == 0) return {{"n", 0}};
  return {{"n", a.n}, {"mean", a.mean}, {"q25", a.q25}, {"q50", a.q50}, {"q75", a.q75}};
}

Json deterministic_json(const CoverageReport& r, const ExperimentConfig& c) {
  Json methods = Json::array();
  for (const MethodReport& m : r.methods) {
    methods.push_back({{"label", m.label},
                       {"method", to_string(m.kind)},
                       {"threshold", m.threshold},
                       {"hits", m.hits},
                       {"coverage_rate", m.coverage_rate},
                       {"wilson_interval_95", {m.wilson_lo, m.wilson_hi}},
                       {"empty_count", m.empty_count},
                       {"failure_count", m.failure_count},
                       {"area", area_json(m.area)}});
  }
  Json inc = Json::array();
  for (const InclusionReport& i : r.inclusion)
    inc.push_back({{"inner", i.inner}, {"outer", i.outer}, {"checked", i.checked}, {"violations", i.violations}});
  return {{"schema_version", kSchemaVersion},
          {"config", to_json(c)},
          {"n_trials", r.n_trials},
          {"truth", to_json(r.truth)},
          {"methods", methods},
          {"inclusion", inc},
          {"failures", r.failures},
          {"flagged", r.flagged}};
}

}  // namespace

const char* to_string(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::SsbX: return "ssb_x";
    case MethodKind::SsbMu: return "ssb_mu";
    case MethodKind::QzeroX: return "qzero_x";
    case MethodKind::QzeroMu: return "qzero_mu";
    case MethodKind::Bonferroni: return "bonferroni";
    case MethodKind::SplitNaive: return "split_naive";
    case MethodKind::SplitRefined: return "split_refined";
    case MethodKind::Custom: return "custom";
  }
  return "?";
}

MethodKind parse_method(const std::string& name) {
  for (MethodKind m : {MethodKind::SsbX, MethodKind::SsbMu, MethodKind::QzeroX, MethodKind::QzeroMu,
                       MethodKind::Bonferroni, MethodKind::SplitNaive, MethodKind::SplitRefined, MethodKind::Custom})
    if (name == to_string(m)) return m;
  throw Error(ErrorCode::UnknownMethod, "unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
  spec.validate();
  if (x_star.size() != spec.p()) throw Error(ErrorCode::InvalidConfig, "x_star has wrong size");
  if (!spec.constraints.contains(x_star)) throw Error(ErrorCode::InvalidConfig, "x_star violates the constraints");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  if (n_trials < 1) throw Error(ErrorCode::InvalidConfig, "n_trials must be >= 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "no methods given");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "split alpha1_fraction must lie in (0, 1)");
  if (area.enabled && (area.n_angles < 3 || !(area.r_tol > 0.0)))
    throw Error(ErrorCode::InvalidConfig, "area: need n_angles >= 3 and r_tol > 0");
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t j = i + 1; j < methods.size(); ++j)
      if (methods[i].label == methods[j].label)
        throw Error(ErrorCode::InvalidConfig, "duplicate method label '" + methods[i].label + "'");
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
      throw Error(ErrorCode::InvalidConfig, "schema_version must be " + std::to_string(kSchemaVersion));
    if (!j.contains("spec")) throw Error(ErrorCode::InvalidConfig, "spec is required");
    c.spec = spec_from_json(j.at("spec"));
    if (!j.contains("x_star")) throw Error(ErrorCode::InvalidConfig, "x_star is required");
    c.x_star = vector_from_json(j.at("x_star"), "x_star");
    c.alpha = j.value("alpha", c.alpha);
    const long long nt = j.value("n_trials", static_cast<long long>(c.n_trials));
    if (nt < 1) throw Error(ErrorCode::InvalidConfig, "n_trials must be >= 1");
    c.n_trials = static_cast<std::size_t>(nt);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.calibration.sampling.threads = c.threads;
    if (j.contains("calibration")) {
      const Json& cal = j.at("calibration");
      c.calibration.n_samples = cal.value("n_samples", c.calibration.n_samples);
      c.calibration.seed = cal.value("seed", c.calibration.seed);
      c.calibration.vertex_budget = cal.value("vertex_budget", c.calibration.vertex_budget);
    }
    if (j.contains("split")) c.split_fraction = j.at("split").value("alpha1_fraction", c.split_fraction);
    if (j.contains("area")) {
      const Json& a = j.at("area");
      c.area.enabled = a.value("enabled", true);
      c.area.n_angles = a.value("n_angles", c.area.n_angles);
      c.area.r_tol = a.value("r_tol", c.area.r_tol);
      c.area.n_trials = a.value("n_trials", c.area.n_trials);
    }
    c.output_path = j.value("output_path", std::string());
    if (!j.contains("methods") || !j.at("methods").is_array())
      throw Error(ErrorCode::InvalidConfig, "methods must be an array");
    for (const Json& m : j.at("methods")) {
      MethodDescriptor d;
      if (m.is_string()) {
        d.kind = parse_method(m.get<std::string>());
      } else {
        d.kind = parse_method(m.at("name").get<std::string>());
        d.label = m.value("label", std::string());
        if (d.kind == MethodKind::Custom) {
          d.stat = parse_statistic(m.value("stat", std::string("l1")));
          if (!m.contains("threshold")) throw Error(ErrorCode::InvalidConfig, "custom method needs a threshold");
          d.threshold = m.at("threshold").get<double>();
        }
      }
      if (d.kind == MethodKind::Custom && m.is_string())
        throw Error(ErrorCode::InvalidConfig, "custom method needs {\"stat\", \"threshold\"}");
      if (d.label.empty()) d.label = to_string(d.kind);
      c.methods.push_back(d);
    }
    c.validate();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json methods = Json::array();
  for (const MethodDescriptor& d : c.methods) {
    Json m = {{"name", to_string(d.kind)}, {"label", d.label}};
    if (d.kind == MethodKind::Custom) {
      m["stat"] = to_string(d.stat);
      m["threshold"] = d.threshold;
    }
    methods.push_back(m);
  }
  Json j = {{"schema_version", kSchemaVersion},
            {"spec", to_json(c.spec)},
            {"x_star", to_json(c.x_star)},
            {"alpha", c.alpha},
            {"n_trials", c.n_trials},
            {"seed", c.seed},
            {"methods", methods},
            {"calibration",
             {{"n_samples", c.calibration.n_samples},
              {"seed", c.calibration.seed},
              {"vertex_budget", c.calibration.vertex_budget}}},
            {"split", {{"alpha1_fraction", c.split_fraction}}},
            {"area",
             {{"enabled", c.area.enabled},
              {"n_angles", c.area.n_angles},
              {"r_tol", c.area.r_tol},
              {"n_trials", c.area.n_trials}}}};
  return j;
}

std::unique_ptr<MethodFactory> build_method(const MethodDescriptor& d, const ProblemSpec& spec, double alpha,
                                            const CalibrationOptions& opts, double split_fraction) {
  MethodDescriptor desc = d;
  if (desc.label.empty()) desc.label = to_string(d.kind);
  switch (d.kind) {
    case MethodKind::SsbX:
      return std::make_unique<BoxFactory>(
          desc, spec,
          std::vector<ThresholdRule>{global_threshold(spec, TestStatistic::Lambda1, alpha, ThresholdMethod::ChiSqN)});
    case MethodKind::QzeroX:
      return std::make_unique<BoxFactory>(
          desc, spec,
          std::vector<ThresholdRule>{
              global_threshold(spec, TestStatistic::Lambda1, alpha, ThresholdMethod::Auto, opts)});
    case MethodKind::SsbMu:
      return std::make_unique<MuFactory>(
          desc, spec, TestStatistic::Lambda1,
          global_threshold(spec, TestStatistic::Lambda1, alpha, ThresholdMethod::ChiSqN));
    case MethodKind::QzeroMu:
      return std::make_unique<MuFactory>(
          desc, spec, TestStatistic::Lambda1,
          global_threshold(spec, TestStatistic::Lambda1, alpha, ThresholdMethod::Auto, opts));
    case MethodKind::Bonferroni: {
      std::vector<ThresholdRule> rules;
      const double a = alpha / static_cast<double>(spec.k());
      for (Eigen::Index i = 0; i < spec.k(); ++i)
        rules.push_back(global_threshold(row_spec(spec, i), TestStatistic::Lambda1, a, ThresholdMethod::Auto, opts));
      return std::make_unique<BoxFactory>(desc, spec, std::move(rules));
    }
    case MethodKind::SplitNaive:
    case MethodKind::SplitRefined:
      return std::make_unique<SplitFactory>(desc, spec, alpha, split_fraction, opts);
    case MethodKind::Custom:
      return std::make_unique<MuFactory>(desc, spec, d.stat, ThresholdRule::user(d.threshold));
  }
  throw Error(ErrorCode::UnknownMethod, "unknown method");
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  return {hits == 0 ? 0.0 : std::max(0.0, center - half), hits == n ? 1.0 : std::min(1.0, center + half)};
}

const MethodReport& CoverageReport::method(const std::string& label) const {
  for (const MethodReport& m : methods)
    if (m.label == label) return m;
  throw Error(ErrorCode::UnknownMethod, "no method labelled '" + label + "' in report");
}

CoverageReport run_coverage(const ExperimentConfig& config) {
  config.validate();
  const ProblemSpec& spec = config.spec;
  std::vector<std::unique_ptr<MethodFactory>> factories;
  std::vector<double> setup_time;
  for (const MethodDescriptor& d : config.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    factories.push_back(build_method(d, spec, config.alpha, config.calibration, config.split_fraction));
    setup_time.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  const std::size_t M = factories.size();
  const std::size_t N = config.n_trials;
  const bool areas = config.area.enabled && spec.k() == 2;
  const std::size_t NA = areas ? std::min(config.area.n_trials, N) : 0;
  const AreaSettings as{config.area.n_angles, config.area.r_tol};
  const Vector truth = spec.H * config.x_star;
  const Vector signal = spec.K * config.x_star;

  // mu-description inside its x-description box
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  auto find = [&](MethodKind k) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < M; ++i)
      if (config.methods[i].kind == k) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  for (auto [inner, outer] : {std::pair{MethodKind::SsbMu, MethodKind::SsbX},
                              std::pair{MethodKind::QzeroMu, MethodKind::QzeroX}}) {
    const auto a = find(inner), b = find(outer);
    if (a >= 0 && b >= 0) pairs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }

  enum Outcome : unsigned char { Miss = 0, Hit = 1, Empty = 2, Failed = 3 };
  std::vector<unsigned char> outcome(N * M, Miss);
  std::vector<double> area(NA * M, kNaN);
  std::vector<double> seconds(N * M, 0.0);
  std::vector<unsigned char> incl_checked(NA * pairs.size(), 0), incl_bad(NA * pairs.size(), 0);

  parallel_for(N, config.threads, [&](std::size_t t) {
    const Vector y = signal + standard_normal(config.seed, t, spec.n(), kTrialSalt);
    std::vector<std::unique_ptr<MethodRegion>> regions(M);
    for (std::size_t m = 0; m < M; ++m) {
      const auto t0 = std::chrono::steady_clock::now();
      unsigned char& o = outcome[t * M + m];
      try {
        regions[m] = factories[m]->build(y);
        if (regions[m]->empty()) {
          o = Empty;
        } else {
          o = regions[m]->contains(truth) ? Hit : Miss;
          if (t < NA) area[t * M + m] = regions[m]->area(as);
        }
      } catch (const Error& e) {
        o = e.code() == ErrorCode::EmptyRegion ? Empty : Failed;
      }
      seconds[t * M + m] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    if (t >= NA) return;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [a, b] = pairs[q];
      if (outcome[t * M + a] >= Empty || outcome[t * M + b] >= Empty) continue;
      try {
        const IntervalK box = regions[b]->bounding_box();
        bool ok = true;
        for (const Vector& p : regions[a]->boundary(as)) {
          for (std::size_t i = 0; i < box.intervals.size(); ++i) {
            const Interval& iv = box.intervals[i];
            const double v = p[static_cast<Eigen::Index>(i)];
            const double tol = 1e-6 * (1.0 + std::abs(v));
            if (v < iv.lo - tol || v > iv.hi + tol) ok = false;
          }
        }
        incl_checked[t * pairs.size() + q] = 1;
        incl_bad[t * pairs.size() + q] = ok ? 0 : 1;
      } catch (const Error&) {
      }
    }
  });

  CoverageReport r;
  r.truth = truth;
  r.n_trials = N;
  for (std::size_t m = 0; m < M; ++m) {
    MethodReport mr;
    mr.label = config.methods[m].label;
    mr.kind = config.methods[m].kind;
    mr.threshold = factories[m]->thresholds();
    mr.runtime_seconds = setup_time[m];
    for (std::size_t t = 0; t < N; ++t) {
      switch (outcome[t * M + m]) {
        case Hit: ++mr.hits; break;
        case Empty: ++mr.empty_count; break;
        case Failed: ++mr.failure_count; break;
        default: break;
      }
      mr.runtime_seconds += seconds[t * M + m];
    }
    mr.coverage_rate = static_cast<double>(mr.hits) / static_cast<double>(N);
    std::tie(mr.wilson_lo, mr.wilson_hi) = wilson_interval(mr.hits, N);
    for (std::size_t t = 0; t < NA; ++t) mr.areas.push_back(area[t * M + m]);
    mr.area = summarize(mr.areas);
    r.failures += mr.failure_count;
    if (static_cast<double>(mr.failure_count) >= 1e-3 * static_cast<double>(N)) r.flagged = true;
    r.methods.push_back(std::move(mr));
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    InclusionReport ir;
    ir.inner = config.methods[pairs[q].first].label;
    ir.outer = config.methods[pairs[q].second].label;
    for (std::size_t t = 0; t < NA; ++t) {
      ir.checked += incl_checked[t * pairs.size() + q];
      ir.violations += incl_bad[t * pairs.size() + q];
    }
    r.inclusion.push_back(ir);
  }
  r.result_hash = hex64(fnv1a(deterministic_json(r, config).dump()));
  return r;
}

Json to_json(const CoverageReport& r, const ExperimentConfig& c) {
  Json j = deterministic_json(r, c);
  for (std::size_t i = 0; i < r.methods.size(); ++i) j["methods"][i]["runtime_seconds"] = r.methods[i].runtime_seconds;
  j["result_hash"] = r.result_hash;
  return j;
}

std::string areas_csv(const CoverageReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "trial,method,area\n";
  for (const MethodReport& m : r.methods)
    for (std::size_t t = 0; t < m.areas.size(); ++t) {
      os << t << ',' << m.label << ',';
      if (std::isfinite(m.areas[t])) os << m.areas[t];
      os << '\n';
    }
  return os.str();
}

}  // namespace confreg
