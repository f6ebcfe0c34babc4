#include "confreg/confreg.h"

#include "confreg/calibration.hpp"
#include "confreg/distributions.hpp"
#include "confreg/errors.hpp"
#include "confreg/harness.hpp"
#include "confreg/json_io.hpp"
#include "confreg/reductions.hpp"
#include "confreg/regions.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <span>
#include <string>

using namespace confreg;

struct cr_spec {
  ProblemSpec spec;
};

struct cr_region {
  std::unique_ptr<Region> region;
};

namespace {

thread_local std::string g_last_error;

cr_status fail(cr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
cr_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return CR_OK;
  } catch (const Error& e) {
    return fail(static_cast<cr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CR_INTERNAL, e.what());
  }
}

#define CR_REQUIRE(p)                                     \
  do {                                                    \
    if (!(p)) return fail(CR_NULL_ARGUMENT, "null argument: " #p); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Vector vec(const double* d, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d[i];
  return v;
}

Matrix mat(const double* d, std::size_t r, std::size_t c) { return from_row_major(r, c, std::span<const double>(d, r * c)); }

TestStatistic stat_of(cr_statistic s) {
  switch (s) {
    case CR_LAMBDA1: return TestStatistic::Lambda1;
    case CR_LAMBDA2U: return TestStatistic::Lambda2U;
    case CR_LAMBDA2C: return TestStatistic::Lambda2C;
  }
  throw Error(ErrorCode::DomainError, "unknown statistic");
}

ChiBarMixture mixture(size_t n, const double* w) {
  ChiBarMixture m;
  m.weights.assign(w, w + n);
  return m;
}

}  // namespace

extern "C" {

const char* cr_last_error(void) { return g_last_error.c_str(); }

const char* cr_status_string(cr_status s) {
  if (s == CR_NULL_ARGUMENT) return "NullArgument";
  return to_string(static_cast<ErrorCode>(s));
}

const char* cr_version(void) { return "1.0.0"; }

void cr_string_free(char* s) { std::free(s); }

cr_status cr_spec_create(size_t n, size_t p, size_t k, const double* K, const double* H, cr_spec** out) {
  CR_REQUIRE(out);
  CR_REQUIRE(K || n * p == 0);
  CR_REQUIRE(H || k * p == 0);
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<cr_spec>();
    s->spec.K = mat(K, n, p);
    s->spec.H = mat(H, k, p);
    s->spec.constraints = ConstraintSet::none(static_cast<Eigen::Index>(p));
    s->spec.validate();
    *out = s.release();
  });
}

cr_status cr_spec_from_json(const char* json, cr_spec** out) {
  CR_REQUIRE(json);
  CR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<cr_spec>();
    s->spec = spec_from_json(parse_json(json));
    *out = s.release();
  });
}

cr_status cr_spec_to_json(const cr_spec* spec, char** out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(out);
  return guarded([&] { *out = dup_string(to_json(spec->spec).dump(2)); });
}

void cr_spec_free(cr_spec* spec) { delete spec; }

cr_status cr_spec_dims(const cr_spec* spec, size_t* n, size_t* p, size_t* k) {
  CR_REQUIRE(spec);
  if (n) *n = static_cast<size_t>(spec->spec.n());
  if (p) *p = static_cast<size_t>(spec->spec.p());
  if (k) *k = static_cast<size_t>(spec->spec.k());
  return CR_OK;
}

cr_status cr_spec_set_nonnegative(cr_spec* spec) {
  CR_REQUIRE(spec);
  return guarded([&] { spec->spec.constraints = ConstraintSet::nonnegative(spec->spec.p()); });
}

cr_status cr_spec_set_box(cr_spec* spec, const double* lo, const double* up) {
  CR_REQUIRE(spec);
  CR_REQUIRE(lo);
  CR_REQUIRE(up);
  return guarded([&] {
    const Eigen::Index p = spec->spec.p();
    ConstraintSet c(Box{vec(lo, p), vec(up, p)});
    ProblemSpec s = spec->spec;
    s.constraints = c;
    s.validate();
    spec->spec = std::move(s);
  });
}

cr_status cr_spec_set_linear(cr_spec* spec, size_t m, const double* A, const double* b) {
  CR_REQUIRE(spec);
  CR_REQUIRE(A || m == 0);
  CR_REQUIRE(b || m == 0);
  return guarded([&] {
    const Eigen::Index p = spec->spec.p();
    ProblemSpec s = spec->spec;
    s.constraints = ConstraintSet(LinearInequality{mat(A, m, static_cast<size_t>(p)), vec(b, static_cast<Eigen::Index>(m))});
    s.validate();
    spec->spec = std::move(s);
  });
}

cr_status cr_spec_set_cone(cr_spec* spec, size_t m, const double* A) {
  CR_REQUIRE(spec);
  CR_REQUIRE(A || m == 0);
  return guarded([&] {
    const Eigen::Index p = spec->spec.p();
    ProblemSpec s = spec->spec;
    s.constraints = ConstraintSet(PolyhedralCone{mat(A, m, static_cast<size_t>(p))});
    s.validate();
    spec->spec = std::move(s);
  });
}

cr_status cr_parse_statistic(const char* name, cr_statistic* out) {
  CR_REQUIRE(name);
  CR_REQUIRE(out);
  return guarded([&] {
    switch (parse_statistic(name)) {
      case TestStatistic::Lambda1: *out = CR_LAMBDA1; break;
      case TestStatistic::Lambda2U: *out = CR_LAMBDA2U; break;
      case TestStatistic::Lambda2C: *out = CR_LAMBDA2C; break;
    }
  });
}

cr_status cr_statistic_eval(const cr_spec* spec, cr_statistic stat, const double* mu, const double* y, double* out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(mu);
  CR_REQUIRE(y);
  CR_REQUIRE(out);
  return guarded([&] {
    *out = eval_statistic(stat_of(stat), spec->spec, vec(mu, spec->spec.k()), vec(y, spec->spec.n()));
  });
}

cr_status cr_chi2_quantile(int df, double p, double* out) {
  CR_REQUIRE(out);
  return guarded([&] { *out = chi2_quantile(df, p); });
}

cr_status cr_chibar_cdf(size_t n_weights, const double* weights, double x, double* out) {
  CR_REQUIRE(weights);
  CR_REQUIRE(out);
  return guarded([&] { *out = chibar_cdf(mixture(n_weights, weights), x); });
}

cr_status cr_chibar_quantile(size_t n_weights, const double* weights, double p, double* out) {
  CR_REQUIRE(weights);
  CR_REQUIRE(out);
  return guarded([&] { *out = chibar_quantile(mixture(n_weights, weights), p); });
}

void cr_calibration_options_default(cr_calibration_options* opts) {
  if (!opts) return;
  const CalibrationOptions d;
  opts->n_samples = d.n_samples;
  opts->seed = d.seed;
  opts->vertex_budget = d.vertex_budget;
  opts->threads = 1;
}

cr_status cr_calibrate(const cr_spec* spec, cr_statistic stat, double alpha, const char* method,
                       const cr_calibration_options* opts, cr_threshold* out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(out);
  return guarded([&] {
    CalibrationOptions o;
    if (opts) {
      o.n_samples = opts->n_samples;
      o.seed = opts->seed;
      o.vertex_budget = opts->vertex_budget;
      o.sampling.threads = opts->threads;
    }
    const ThresholdMethod m = parse_threshold_method(method ? method : "auto");
    const ThresholdRule r = global_threshold(spec->spec, stat_of(stat), alpha, m, o);
    out->delta = r.delta;
    out->std_error = r.std_error;
    out->n_samples = r.n_samples;
    out->points_evaluated = r.points_evaluated;
    out->budget_exceeded = r.budget_exceeded ? 1 : 0;
    std::snprintf(out->provenance, sizeof out->provenance, "%s", to_string(r.provenance));
  });
}

cr_status cr_chibar_weights(const cr_spec* spec, cr_statistic stat, size_t n_samples, uint64_t seed, int threads,
                            double* weights, size_t cap, size_t* len, int* degenerate) {
  CR_REQUIRE(spec);
  CR_REQUIRE(weights);
  CR_REQUIRE(len);
  return guarded([&] {
    SamplingOptions so;
    so.threads = threads;
    const ChiBarEstimate e = estimate_chibar_weights(spec->spec, stat_of(stat), n_samples, seed, so);
    const auto& w = e.mixture.weights;
    if (w.size() > cap) throw Error(ErrorCode::DimensionMismatch, "weights buffer too small");
    std::copy(w.begin(), w.end(), weights);
    *len = w.size();
    if (degenerate) *degenerate = e.degenerate ? 1 : 0;
  });
}

cr_status cr_region_create(const cr_spec* spec, cr_statistic stat, double delta, const double* y, cr_region** out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(y);
  CR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<cr_region>();
    r->region = std::make_unique<Region>(
        RegionSpec{spec->spec, stat_of(stat), ThresholdRule::user(delta), vec(y, spec->spec.n())});
    *out = r.release();
  });
}

void cr_region_free(cr_region* region) { delete region; }

cr_status cr_region_contains(const cr_region* region, const double* mu, int* out) {
  CR_REQUIRE(region);
  CR_REQUIRE(mu);
  CR_REQUIRE(out);
  return guarded([&] { *out = region->region->contains(vec(mu, region->region->spec().spec.k())) ? 1 : 0; });
}

cr_status cr_region_value(const cr_region* region, const double* mu, double* out) {
  CR_REQUIRE(region);
  CR_REQUIRE(mu);
  CR_REQUIRE(out);
  return guarded([&] { *out = region->region->value(vec(mu, region->region->spec().spec.k())); });
}

cr_status cr_region_is_empty(const cr_region* region, int* out) {
  CR_REQUIRE(region);
  CR_REQUIRE(out);
  return guarded([&] { *out = region->region->empty() ? 1 : 0; });
}

cr_status cr_region_bounding_box(const cr_region* region, double* lo, double* hi) {
  CR_REQUIRE(region);
  CR_REQUIRE(lo);
  CR_REQUIRE(hi);
  return guarded([&] {
    const IntervalK box = bounding_box(region->region->spec());
    for (std::size_t i = 0; i < box.intervals.size(); ++i) {
      lo[i] = box.intervals[i].lo;
      hi[i] = box.intervals[i].hi;
    }
  });
}

cr_status cr_region_area(const cr_region* region, int n_angles, double r_tol, double* out) {
  CR_REQUIRE(region);
  CR_REQUIRE(out);
  return guarded([&] { *out = region_area(*region->region, AreaSettings{n_angles, r_tol}); });
}

cr_status cr_region_boundary_csv(const cr_region* region, int n_angles, double r_tol, char** out) {
  CR_REQUIRE(region);
  CR_REQUIRE(out);
  return guarded([&] { *out = dup_string(boundary_csv(region_boundary(*region->region, AreaSettings{n_angles, r_tol}))); });
}

cr_status cr_boundedness(const cr_spec* spec, cr_bound_kind* kinds) {
  CR_REQUIRE(spec);
  CR_REQUIRE(kinds);
  return guarded([&] {
    const auto rep = boundedness_report(spec->spec);
    for (std::size_t i = 0; i < rep.size(); ++i) kinds[i] = static_cast<cr_bound_kind>(rep[i]);
  });
}

const char* cr_bound_kind_string(cr_bound_kind kind) { return to_string(static_cast<BoundKind>(kind)); }

cr_status cr_reduce_tfm(const cr_spec* spec, const double* y, char** out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(out);
  return guarded([&] {
    const TfmReduced r = tfm_reduce(spec->spec.K, spec->spec.H);
    Json j = to_json(r.spec);
    j["reduction"] = "tfm";
    j["Sigma"] = to_json(r.Sigma);
    j["tilde_H"] = to_json(r.tilde_H);
    j["expanded"] = to_json(r.expanded);
    j["y_map"] = to_json(Matrix(r.whitening.W * r.y_map));
    j["k1"] = r.k1;
    j["singular_sigma"] = r.singular_sigma;
    if (y) j["y"] = to_json(r.reduce_y(vec(y, spec->spec.n())));
    *out = dup_string(j.dump(2));
  });
}

cr_status cr_reduce_box(const cr_spec* spec, const double* lo, const double* up, const double* y, char** out) {
  CR_REQUIRE(spec);
  CR_REQUIRE(lo);
  CR_REQUIRE(up);
  CR_REQUIRE(out);
  return guarded([&] {
    const ProblemSpec& s = spec->spec;
    if (s.k() != 1) throw Error(ErrorCode::NotApplicable, "box reduction is implemented for k = 1");
    const Eigen::Index p = s.p();
    const BoxNormalized norm = box_normalize(s.K, vec(lo, p), vec(up, p));
    const Vector h = s.H.row(0).transpose();
    const BoxReduced r = box_reduce_k1(norm, norm.h_z(h));
    Json j = to_json(r.spec);
    j["reduction"] = "box";
    j["Sigma"] = to_json(r.Sigma);
    j["M_plus_A"] = r.M_plus_A;
    j["M_minus_A"] = r.M_minus_A;
    j["functional_offset"] = norm.functional_offset(h);
    Json cands = Json::array();
    for (const Vector& c : r.candidates) cands.push_back(to_json(c));
    j["candidates"] = cands;
    j["singular_sigma"] = r.singular_sigma;
    if (y) j["y"] = to_json(r.reduce_y(vec(y, s.n()) + norm.y_shift));
    *out = dup_string(j.dump(2));
  });
}

cr_status cr_coverage_run(const char* config_json, char** report, char** areas_csv_out, int* flagged) {
  CR_REQUIRE(config_json);
  return guarded([&] {
    const ExperimentConfig c = config_from_json(parse_json(config_json));
    const CoverageReport r = run_coverage(c);
    if (flagged) *flagged = r.flagged ? 1 : 0;
    if (report) *report = dup_string(to_json(r, c).dump(2));
    if (areas_csv_out) *areas_csv_out = dup_string(areas_csv(r));
  });
}

}  // extern "C"
