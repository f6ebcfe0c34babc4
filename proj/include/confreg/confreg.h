#ifndef CONFREG_H
#define CONFREG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CR_API __declspec(dllexport)
#else
#define CR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the numeric values match the C++ ErrorCode enum. */
typedef enum cr_status {
  CR_OK = 0,
  CR_DIMENSION_MISMATCH = 1,
  CR_ROW_SPACE_VIOLATION = 2,
  CR_NOT_POSITIVE_DEFINITE = 3,
  CR_ITERATION_LIMIT = 4,
  CR_INFEASIBLE_BASE_POINT = 5,
  CR_DOMAIN_ERROR = 6,
  CR_ATOM_ERROR = 7,
  CR_VERTEX_BUDGET_EXCEEDED = 8,
  CR_UNSUPPORTED_STATISTIC = 9,
  CR_UNSUPPORTED_CONSTRAINT = 10,
  CR_DEGENERATE_CONE = 11,
  CR_BRACKET_ERROR = 12,
  CR_EMPTY_REGION = 13,
  CR_NOT_TWO_DIMENSIONAL = 14,
  CR_INTERIOR_POINT_OUTSIDE = 15,
  CR_NOT_APPLICABLE = 16,
  CR_SINGULAR_SIGMA = 17,
  CR_UNKNOWN_METHOD = 18,
  CR_INVALID_CONFIG = 19,
  CR_PARSE_ERROR = 20,
  CR_INFEASIBLE_SPEC = 21,
  CR_NULL_ARGUMENT = 98,
  CR_INTERNAL = 99
} cr_status;

typedef enum cr_statistic { CR_LAMBDA1 = 0, CR_LAMBDA2U = 1, CR_LAMBDA2C = 2 } cr_statistic;

typedef enum cr_bound_kind {
  CR_BOUND_FINITE = 0,
  CR_BOUND_UPPER_ONLY = 1,
  CR_BOUND_LOWER_ONLY = 2,
  CR_BOUND_UNBOUNDED = 3
} cr_bound_kind;

typedef struct cr_spec cr_spec;
typedef struct cr_region cr_region;

/* Message of the last failing call on this thread ("" if none). */
CR_API const char* cr_last_error(void);
CR_API const char* cr_status_string(cr_status s);
CR_API const char* cr_version(void);
/* Frees strings returned through char** out-parameters. */
CR_API void cr_string_free(char* s);

/* Problem specification. Matrices are dense row-major. A new spec has no
   constraints. */
CR_API cr_status cr_spec_create(size_t n, size_t p, size_t k, const double* K, const double* H, cr_spec** out);
CR_API cr_status cr_spec_from_json(const char* json, cr_spec** out);
CR_API cr_status cr_spec_to_json(const cr_spec* spec, char** out);
CR_API void cr_spec_free(cr_spec* spec);
CR_API cr_status cr_spec_dims(const cr_spec* spec, size_t* n, size_t* p, size_t* k);
CR_API cr_status cr_spec_set_nonnegative(cr_spec* spec);
/* Infinite bounds are allowed. */
CR_API cr_status cr_spec_set_box(cr_spec* spec, const double* lo, const double* up);
/* {x : A x <= b}, A is m x p. */
CR_API cr_status cr_spec_set_linear(cr_spec* spec, size_t m, const double* A, const double* b);
/* {x : A x <= 0}. */
CR_API cr_status cr_spec_set_cone(cr_spec* spec, size_t m, const double* A);

CR_API cr_status cr_parse_statistic(const char* name, cr_statistic* out);
CR_API cr_status cr_statistic_eval(const cr_spec* spec, cr_statistic stat, const double* mu, const double* y,
                                   double* out);

CR_API cr_status cr_chi2_quantile(int df, double p, double* out);
/* weights[d] is the mass on chi-square with d degrees of freedom. */
CR_API cr_status cr_chibar_cdf(size_t n_weights, const double* weights, double x, double* out);
CR_API cr_status cr_chibar_quantile(size_t n_weights, const double* weights, double p, double* out);

typedef struct cr_calibration_options {
  size_t n_samples;
  uint64_t seed;
  size_t vertex_budget;
  int threads;
} cr_calibration_options;

CR_API void cr_calibration_options_default(cr_calibration_options* opts);

typedef struct cr_threshold {
  double delta;
  double std_error;
  size_t n_samples;
  size_t points_evaluated;
  int budget_exceeded;
  char provenance[32];
} cr_threshold;

/* method: "auto", "origin", "vertices", "chisq-n" or "chisq-rank". */
CR_API cr_status cr_calibrate(const cr_spec* spec, cr_statistic stat, double alpha, const char* method,
                              const cr_calibration_options* opts, cr_threshold* out);

/* Chi-bar weight estimate; weights has room for cap entries and receives
   ambient_dimension + 1 of them. */
CR_API cr_status cr_chibar_weights(const cr_spec* spec, cr_statistic stat, size_t n_samples, uint64_t seed,
                                   int threads, double* weights, size_t cap, size_t* len, int* degenerate);

/* {mu : stat(mu, y) <= delta}. */
CR_API cr_status cr_region_create(const cr_spec* spec, cr_statistic stat, double delta, const double* y,
                                  cr_region** out);
CR_API void cr_region_free(cr_region* region);
CR_API cr_status cr_region_contains(const cr_region* region, const double* mu, int* out);
CR_API cr_status cr_region_value(const cr_region* region, const double* mu, double* out);
CR_API cr_status cr_region_is_empty(const cr_region* region, int* out);
/* lo and hi receive k entries each (may be infinite). */
CR_API cr_status cr_region_bounding_box(const cr_region* region, double* lo, double* hi);
CR_API cr_status cr_region_area(const cr_region* region, int n_angles, double r_tol, double* out);
/* CSV with header theta,r,mu1,mu2. */
CR_API cr_status cr_region_boundary_csv(const cr_region* region, int n_angles, double r_tol, char** out);

/* kinds receives k entries. */
CR_API cr_status cr_boundedness(const cr_spec* spec, cr_bound_kind* kinds);
CR_API const char* cr_bound_kind_string(cr_bound_kind kind);

/* Reduced problems as JSON objects that are themselves valid specs. y may
   be NULL; when given the reduced observation is included as "y". */
CR_API cr_status cr_reduce_tfm(const cr_spec* spec, const double* y, char** out);
/* k = 1 box reduction of the first row of H. */
CR_API cr_status cr_reduce_box(const cr_spec* spec, const double* lo, const double* up, const double* y, char** out);

/* Coverage experiment from a JSON config. report and areas_csv may be NULL.
   flagged is set when the solver-failure budget was exceeded. */
CR_API cr_status cr_coverage_run(const char* config_json, char** report, char** areas_csv, int* flagged);

#ifdef __cplusplus
}
#endif

#endif
