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

/*
 * C API for the Poisson transport-map library.
 *
 * The library realizes ultra-log-concave probability measures on the
 * nonnegative integers as the time-T value of a counting process driven by a
 * planar Poisson configuration: an atom (t, z) is accepted iff z lies below a
 * state-dependent acceptance intensity derived from the target's density along
 * the Poisson smoothing semigroup.  On top of the constructive map, the
 * library verifies its contraction property (the add-one-atom derivative of
 * the path is 0 or 1 and can only lower the intensity) and a family of
 * entropy, Poincare and transport-cost comparisons for the target class.
 *
 * Conventions:
 *  - every function returns ptm_status; results go through out-parameters,
 *  - a non-OK status leaves out-parameters untouched and stores a
 *    human-readable message retrievable with ptm_last_error() (thread local),
 *  - strings returned through char** out-parameters are heap allocated and
 *    must be released with ptm_string_free(),
 *  - handles are opaque; each ptm_*_free accepts NULL.
 *
 * Thread safety: handles are immutable after creation and safe to share
 * across threads (the transporter memoizes semigroup values internally under
 * a lock).  The `threads` arguments parallelize replications internally;
 * numerical results do not depend on the thread count.
 */

#ifndef PTM_H_
#define PTM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptm_status {
  PTM_OK = 0,
  PTM_ERROR_INVALID_ARGUMENT = 1, /* malformed input or precondition breach */
  PTM_ERROR_DOMAIN = 2,           /* valid input outside a functional's domain */
  PTM_ERROR_IO = 3,               /* file could not be read or written */
  PTM_ERROR_INTERNAL = 4          /* invariant breach inside the library */
} ptm_status;

/* An ultra-log-concave target measure on {0..top} with its horizon T. */
typedef struct ptm_measure ptm_measure;

/* A target bound to its semigroup evaluator and drive logic. */
typedef struct ptm_transporter ptm_transporter;

/* One driven trajectory (configuration, acceptance decisions, jumps). */
typedef struct ptm_path ptm_path;

const char* ptm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* ptm_last_error(void);

void ptm_string_free(char* s);

/* ---------------- target measures ---------------- */

/* Poisson(horizon), truncated where the tail drops below 1e-14. */
ptm_status ptm_measure_poisson(double horizon, ptm_measure** out);

/* Binomial(n, p) with horizon 1; n >= 1, 0 < p < 1. */
ptm_status ptm_measure_binomial(long n, double p, ptm_measure** out);

/* Bernoulli(p) with horizon 1; 0 <= p < 1. */
ptm_status ptm_measure_bernoulli(double p, ptm_measure** out);

/* Weights on {0..len-1} summing to 1 (1e-12), ultra-log-concave, support
 * containing 0. */
ptm_status ptm_measure_from_weights(const double* weights, size_t len,
                                    double horizon, ptm_measure** out);

/* Deterministic random target: support size <= max_support. */
ptm_status ptm_measure_random(uint64_t seed, long max_support, ptm_measure** out);

/* Text format: first line "T=<real>", then "<k> <weight>" per support point. */
ptm_status ptm_measure_parse(const char* text, ptm_measure** out);
ptm_status ptm_measure_read_file(const char* path, ptm_measure** out);
ptm_status ptm_measure_serialize(const ptm_measure* m, char** out_text);
ptm_status ptm_measure_write_file(const ptm_measure* m, const char* path);

ptm_status ptm_measure_horizon(const ptm_measure* m, double* out);
ptm_status ptm_measure_support_top(const ptm_measure* m, long* out);
ptm_status ptm_measure_weight(const ptm_measure* m, long k, double* out);
ptm_status ptm_measure_mean(const ptm_measure* m, double* out);

/* Acceptance-intensity ceiling f(1)/f(0). */
ptm_status ptm_measure_intensity_bound(const ptm_measure* m, double* out);

void ptm_measure_free(ptm_measure* m);

/* ---------------- transport ---------------- */

ptm_status ptm_transporter_new(const ptm_measure* m, ptm_transporter** out);

/* P_{T-t} f(k) along the semigroup; t in [0, T]. */
ptm_status ptm_transporter_semigroup_value(const ptm_transporter* tr, double t,
                                           long k, double* out);

/* log P_{T-t} f(k+1) - log P_{T-t} f(k); -inf at the support top. */
ptm_status ptm_transporter_potential_gap(const ptm_transporter* tr, double t,
                                         long k, double* out);

/* exp of the potential gap: the acceptance intensity at (t, k). */
ptm_status ptm_transporter_intensity(const ptm_transporter* tr, double t,
                                     long k, double* out);

/* Drive replication `replication` of master seed `seed`. */
ptm_status ptm_path_new(const ptm_transporter* tr, uint64_t seed,
                        uint64_t replication, ptm_path** out);

/* X_t: accepted atoms strictly before t (left continuous). */
ptm_status ptm_path_value_at(const ptm_path* p, double t, long* out);
ptm_status ptm_path_intensity_at(const ptm_path* p, double t, double* out);
ptm_status ptm_path_final_value(const ptm_path* p, long* out);

/* Add-one-atom derivative X_s(config + (t,z)) - X_s(config) for the
 * configuration of (seed, replication). */
ptm_status ptm_transporter_malliavin_delta(const ptm_transporter* tr,
                                           uint64_t seed, uint64_t replication,
                                           double t, double z, double s,
                                           long* out);

/* Audit trail CSV: index,t,z,intensity,accepted,x_after. */
ptm_status ptm_path_csv(const ptm_path* p, char** out_csv);

void ptm_path_free(ptm_path* p);
void ptm_transporter_free(ptm_transporter* tr);

/* ---------------- verification runners ----------------
 *
 * Each runner returns a JSON object (sorted keys).  Every JSON body contains
 * "violations": the number of failed asserted checks, 0 when the runner only
 * measures.  CSV out-parameters may be NULL when not wanted.
 */

/* Structural checks: ultra-log-concavity, log-concavity of the density,
 * normalization. */
ptm_status ptm_run_check_ulc(const ptm_measure* m, char** out_json);

/* Constant chain: mean representation, mean <= |log mu(0)| <= mu(1)/mu(0),
 * closed form and quadrature cross-checks. */
ptm_status ptm_run_chain(const ptm_measure* m, double tol_rel, char** out_json);

/* Semigroup dump over a uniform time grid: t,k,value,log_ratio. */
ptm_status ptm_run_semigroup_csv(const ptm_measure* m, long grid_points,
                                 char** out_csv);

/* Forward-equation marginals vs the closed form, sup-norm per grid time. */
ptm_status ptm_run_fokker_planck(const ptm_measure* m, long grid_points,
                                 char** out_json);

/* n transported final values; histogram JSON plus optional per-replication
 * CSV. */
ptm_status ptm_run_simulate(const ptm_measure* m, long n, uint64_t seed,
                            int threads, char** out_json, char** out_csv);

/* Empirical law of X_t vs the closed form (time < 0 means t = T). */
ptm_status ptm_run_marginal(const ptm_measure* m, double time, long n,
                            uint64_t seed, int threads, char** out_json);

/* Mean acceptance intensity across replications on a uniform grid: must be
 * flat and equal to E[target]/T. */
ptm_status ptm_run_martingale(const ptm_measure* m, long n, long grid_points,
                              uint64_t seed, int threads, char** out_json);

/* Add-one-atom audit over sampled configurations and a probe lattice. */
ptm_status ptm_run_contraction(const ptm_measure* m, long n_configs,
                               uint64_t seed, long grid_side, int threads,
                               char** out_json);

/* Random-instance inequality sweep.
 * family: "mlsi" | "phi" | "transport" | "chain" | "poincare". */
ptm_status ptm_run_ineq_sweep(const char* family, long instances, uint64_t seed,
                              long max_support, double tol_rel, int threads,
                              char** out_json, char** out_rows_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PTM_H_ */
