/*
 * Copyright 2026 The poisson-transport Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiled as C11: proves the public header needs no C++ to consume. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ptm.h"

static int failures = 0;

static void expect(int ok, const char* what) {
  if (!ok) {
    fprintf(stderr, "c_smoke: FAILED: %s (last error: %s)\n", what,
            ptm_last_error());
    ++failures;
  }
}

int main(void) {
  ptm_measure* m = NULL;
  ptm_transporter* tr = NULL;
  ptm_path* path = NULL;
  char* json = NULL;

  expect(ptm_measure_bernoulli(0.5, &m) == PTM_OK, "create bernoulli(1/2)");
  if (m == NULL) return 1;

  double mean = 0.0;
  expect(ptm_measure_mean(m, &mean) == PTM_OK, "query mean");
  expect(fabs(mean - 0.5) < 1e-12, "mean equals 1/2");

  double bound = 0.0;
  expect(ptm_measure_intensity_bound(m, &bound) == PTM_OK, "query bound");
  expect(fabs(bound - 1.0) < 1e-12, "intensity bound equals 1");

  expect(ptm_run_check_ulc(m, &json) == PTM_OK, "run structural checks");
  if (json != NULL) {
    expect(strstr(json, "\"violations\": 0") != NULL, "no structural violations");
    ptm_string_free(json);
    json = NULL;
  }

  expect(ptm_transporter_new(m, &tr) == PTM_OK, "create transporter");
  if (tr != NULL) {
    expect(ptm_path_new(tr, 11, 0, &path) == PTM_OK, "drive a path");
    if (path != NULL) {
      long final_value = -1;
      expect(ptm_path_final_value(path, &final_value) == PTM_OK, "final value");
      expect(final_value == 0 || final_value == 1, "final value in support");
    }
  }

  /* Errors must report without touching out-parameters. */
  ptm_measure* bad = NULL;
  expect(ptm_measure_bernoulli(2.0, &bad) == PTM_ERROR_INVALID_ARGUMENT,
         "reject p = 2");
  expect(bad == NULL, "out-parameter untouched on failure");

  ptm_path_free(path);
  ptm_transporter_free(tr);
  ptm_measure_free(m);

  if (failures == 0) {
    printf("c_smoke: all checks passed\n");
    return 0;
  }
  return 1;
}
