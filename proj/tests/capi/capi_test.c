/*
Copyright 2026 The gapdyn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

/* Exercises the C interface from plain C: handle lifecycle, numerics and
 * error reporting. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gapdyn.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void count_lines(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static void test_model(void) {
  gd_model* m = NULL;
  size_t n = 0;
  double z[2] = {1.0, 2.0}, e = 0.0, flow[2];
  CHECK(gd_model_from_json("{\"type\": \"harmonic_oscillator\", \"m\": 1.0, \"k\": 4.0}", &m) == GD_OK);
  CHECK(gd_model_dim(m, &n) == GD_OK && n == 1);
  CHECK(gd_model_energy(m, z, 1, 0.0, &e) == GD_OK);
  CHECK(fabs(e - 4.0) < 1e-15); /* 2^2/2 + 4 * 1/2 */
  CHECK(gd_model_flow(m, z, 1, 0.0, flow) == GD_OK);
  CHECK(flow[0] == 2.0 && flow[1] == -4.0);
  CHECK(gd_model_energy(m, z, 2, 0.0, &e) == GD_ERR_USAGE);
  CHECK(strlen(gd_last_error()) > 0);
  gd_model_free(m);

  m = NULL;
  CHECK(gd_model_from_json("{\"type\": \"warp_drive\"}", &m) == GD_ERR_CONFIG);
  CHECK(m == NULL);
  CHECK(gd_model_from_json("not json", &m) == GD_ERR_CONFIG);
  CHECK(gd_model_dim(NULL, &n) == GD_ERR_USAGE);
}

static void test_function(void) {
  gd_function *f = NULL, *g = NULL;
  double x = 2.0, v = 0.0, px = 0.0, diff = 1.0;
  size_t d = 0;
  CHECK(gd_function_from_json("IndicatorBox[-1,1]", &f) == GD_OK);
  CHECK(gd_function_dim(f, &d) == GD_OK && d == 1);
  CHECK(gd_function_eval(f, &x, 1, &v) == GD_OK && v == HUGE_VAL);
  CHECK(gd_function_prox(f, &x, 1, 0.5, &px) == GD_OK && px == 1.0);
  CHECK(gd_function_polar(f, &g) == GD_OK);
  x = -3.0;
  CHECK(gd_function_eval(g, &x, 1, &v) == GD_OK && v == 3.0);
  CHECK(gd_conjugate_table(f, -2.0, 2.0, 401, "capi_conjugate.csv", &diff) == GD_OK);
  CHECK(diff <= 1e-12);
  gd_function_free(g);
  gd_function_free(f);

  f = NULL;
  CHECK(gd_function_from_json("{\"type\": \"quadratic\", \"a\": 1.0, \"center\": [0.0, 0.0]}", &f) == GD_OK);
  CHECK(gd_conjugate_table(f, -1.0, 1.0, 11, "capi_conjugate_2d.csv", &diff) == GD_ERR_UNSUPPORTED);
  gd_function_free(f);
  CHECK(gd_function_from_json("Quadratic{-1}", &f) != GD_OK);
}

static void test_integration(void) {
  gd_model* m = NULL;
  gd_law* l = NULL;
  gd_trajectory* tr = NULL;
  double z0[2] = {1.0, 0.0}, z[2], eta[2], h0 = 0.0, h = 0.0, res = 1.0, info = 0.0;
  size_t steps = 0;
  int complete = 0;
  CHECK(gd_model_from_json("{\"type\": \"harmonic_oscillator\", \"m\": 1.0, \"k\": 1.0}", &m) == GD_OK);
  CHECK(gd_law_from_json("{\"type\": \"viscous\", \"damping\": 0.2}", m, &l) == GD_OK);
  CHECK(gd_integrate(m, l, z0, 1, 0.0, 1.0, 0.01, 1e-8, 0.0, &tr) == GD_OK);
  CHECK(gd_trajectory_steps(tr, &steps) == GD_OK && steps == 100);
  CHECK(gd_trajectory_complete(tr, &complete) == GD_OK && complete == 1);
  CHECK(gd_trajectory_energy(tr, 0, &h0) == GD_OK && gd_trajectory_energy(tr, steps, &h) == GD_OK);
  CHECK(h < h0);
  CHECK(gd_trajectory_state(tr, steps, z) == GD_OK && z[0] < 1.0);
  CHECK(gd_trajectory_eta(tr, 0, eta) == GD_OK && eta[0] == 0.0);
  CHECK(gd_trajectory_residual(tr, 0, &res) == GD_OK && res <= 1e-8);
  CHECK(gd_trajectory_state(tr, steps + 1, z) == GD_ERR_USAGE);
  CHECK(gd_trajectory_eta(tr, steps, eta) == GD_ERR_USAGE);

  /* I vanishes for the viscous gap 0.2 * 0.5 and is infinite for a pure
   * law with any gap. */
  {
    double zz[2] = {0.0, 0.0}, rate[2] = {0.5, 0.0}, gap[2] = {0.0, 0.1};
    CHECK(gd_information_content(l, zz, rate, gap, 1, &info) == GD_OK && fabs(info) < 1e-15);
  }
  gd_law_free(l);
  l = NULL;
  CHECK(gd_law_from_json("{\"type\": \"pure\"}", m, &l) == GD_OK);
  {
    double zz[2] = {0.0, 0.0}, rate[2] = {0.5, 0.0}, gap[2] = {0.0, -0.1};
    CHECK(gd_information_content(l, zz, rate, gap, 1, &info) == GD_OK && info == HUGE_VAL);
  }
  CHECK(gd_integrate(m, l, z0, 1, 0.0, 1.0, 0.0, 1e-8, 0.0, &tr) == GD_ERR_CONFIG);
  gd_law_free(l);
  l = NULL;
  CHECK(gd_law_from_json("{\"type\": \"plastic\", \"yield\": 1.0}", m, &l) == GD_ERR_CONFIG);
  CHECK(l == NULL);
  gd_trajectory_free(tr);
  gd_model_free(m);
}

static void test_batch(void) {
  int lines = 0, passed = -1, exit_code = -1;
  size_t suites = 0;
  CHECK(gd_status_name(GD_ERR_STEP) != NULL && strcmp(gd_status_name(GD_OK), "ok") == 0);
  CHECK(strlen(gd_version()) > 0);
  CHECK(gd_validate(3, "bogus", NULL, count_lines, &lines, &passed, &suites) == GD_ERR_USAGE);
  CHECK(gd_run_scenario("does/not/exist.json", NULL, -1, &exit_code, NULL, NULL) == GD_ERR_CONFIG);
}

int main(void) {
  test_model();
  test_function();
  test_integration();
  test_batch();
  if (failures) fprintf(stderr, "%d C API checks failed\n", failures);
  else printf("C API checks passed\n");
  return failures ? 1 : 0;
}
