#include "confreg/confreg.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                          \
  do {                                                        \
    if (!(cond)) {                                            \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                             \
    }                                                         \
  } while (0)

int main(void) {
  const double K[] = {2, 1, 1, 0, 1, 1};
  const double H[] = {1, -1, 0, 0, 1, -1};
  cr_spec* spec = NULL;
  EXPECT(cr_spec_create(2, 3, 2, K, H, &spec) == CR_OK);
  EXPECT(cr_spec_set_nonnegative(spec) == CR_OK);

  size_t n, p, k;
  EXPECT(cr_spec_dims(spec, &n, &p, &k) == CR_OK);
  EXPECT(n == 2 && p == 3 && k == 2);

  double q = 0.0;
  EXPECT(cr_chi2_quantile(2, 0.95, &q) == CR_OK);
  EXPECT(fabs(q - 5.991464547) < 1e-8);
  const double w[] = {0.0, 0.5, 0.5};
  EXPECT(cr_chibar_quantile(3, w, 0.68, &q) == CR_OK);
  EXPECT(fabs(q - 1.6421196862) < 1e-8);
  EXPECT(cr_chi2_quantile(2, 1.5, &q) == CR_DOMAIN_ERROR);
  EXPECT(strlen(cr_last_error()) > 0);

  cr_calibration_options opts;
  cr_calibration_options_default(&opts);
  opts.n_samples = 5000;
  opts.seed = 1;
  cr_threshold t;
  EXPECT(cr_calibrate(spec, CR_LAMBDA1, 0.32, "origin", &opts, &t) == CR_OK);
  EXPECT(fabs(t.delta - 1.642) < 0.15);
  EXPECT(strcmp(t.provenance, "quantile_at_origin") == 0);

  /* y = K (1,1,1), so H x = (0,0) */
  const double y[] = {4, 2};
  cr_region* region = NULL;
  EXPECT(cr_region_create(spec, CR_LAMBDA1, t.delta, y, &region) == CR_OK);
  int inside = -1;
  const double center[] = {0, 0}, far[] = {40, 40};
  EXPECT(cr_region_contains(region, center, &inside) == CR_OK && inside == 1);
  EXPECT(cr_region_contains(region, far, &inside) == CR_OK && inside == 0);
  double lo[2], hi[2];
  EXPECT(cr_region_bounding_box(region, lo, hi) == CR_OK);
  EXPECT(lo[0] < 0 && hi[0] > 0 && lo[1] < 0 && hi[1] > 0);
  double area = 0.0;
  EXPECT(cr_region_area(region, 90, 1e-6, &area) == CR_OK);
  EXPECT(area > 0.0 && area < (hi[0] - lo[0]) * (hi[1] - lo[1]));
  char* csv = NULL;
  EXPECT(cr_region_boundary_csv(region, 12, 1e-6, &csv) == CR_OK && csv != NULL);
  cr_string_free(csv);
  cr_region_free(region);

  const double y_bad[] = {-5, -5};
  EXPECT(cr_region_create(spec, CR_LAMBDA1, 0.01, y_bad, &region) == CR_OK);
  int empty = 0;
  EXPECT(cr_region_is_empty(region, &empty) == CR_OK && empty == 1);
  EXPECT(cr_region_area(region, 90, 1e-6, &area) == CR_EMPTY_REGION);
  cr_region_free(region);

  cr_bound_kind kinds[2];
  EXPECT(cr_boundedness(spec, kinds) == CR_OK);
  EXPECT(kinds[0] == CR_BOUND_FINITE && kinds[1] == CR_BOUND_FINITE);

  char* text = NULL;
  EXPECT(cr_reduce_tfm(spec, NULL, &text) == CR_NOT_APPLICABLE);
  EXPECT(cr_spec_to_json(spec, &text) == CR_OK);
  cr_spec* copy = NULL;
  EXPECT(cr_spec_from_json(text, &copy) == CR_OK);
  cr_string_free(text);
  cr_spec_free(copy);

  EXPECT(cr_spec_from_json("{not json", &copy) == CR_PARSE_ERROR);
  EXPECT(cr_region_contains(NULL, center, &inside) == CR_NULL_ARGUMENT);

  cr_spec_free(spec);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
