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

/* C interface to gapdyn. All objects are opaque handles created by a
 * *_from_json or producing call and released with the matching *_free.
 * Every call returns a gd_status; on failure gd_last_error() describes the
 * problem for the calling thread. Phase vectors cross the boundary flattened
 * as (q_0..q_{n-1}, p_0..p_{n-1}). Infinite values are reported as HUGE_VAL. */

#ifndef GAPDYN_H
#define GAPDYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GAPDYN_BUILDING_LIBRARY)
#define GD_API __declspec(dllexport)
#else
#define GD_API __declspec(dllimport)
#endif
#else
#define GD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gd_status {
  GD_OK = 0,
  GD_ERR_USAGE = 1,
  GD_ERR_CONFIG = 2,
  GD_ERR_MODEL = 3,
  GD_ERR_STEP = 4,
  GD_ERR_UNSUPPORTED = 5,
  GD_ERR_IO = 6,
  GD_ERR_INTERNAL = 7
} gd_status;

typedef struct gd_model gd_model;
typedef struct gd_law gd_law;
typedef struct gd_function gd_function;
typedef struct gd_trajectory gd_trajectory;

/* Receives one line of human-readable output; the string is only valid
 * during the call. */
typedef void (*gd_line_sink)(const char* line, void* user);

GD_API const char* gd_version(void);
/* Message of the last failed call on this thread; "" if none. */
GD_API const char* gd_last_error(void);
GD_API const char* gd_status_name(gd_status status);

/* Models */
GD_API gd_status gd_model_from_json(const char* json, gd_model** out);
GD_API void gd_model_free(gd_model* model);
GD_API gd_status gd_model_dim(const gd_model* model, size_t* out);
GD_API gd_status gd_model_energy(const gd_model* model, const double* z, size_t n, double t, double* out);
/* Writes (dH/dp, -dH/dq), 2n values. */
GD_API gd_status gd_model_flow(const gd_model* model, const double* z, size_t n, double t, double* out);

/* Dissipation laws, resolved against a model */
GD_API gd_status gd_law_from_json(const char* json, const gd_model* model, gd_law** out);
GD_API void gd_law_free(gd_law* law);
GD_API gd_status gd_information_content(const gd_law* law, const double* z, const double* z_dot, const double* eta,
                                        size_t n, double* out);

/* Convex functions: JSON or compact notation such as "IndicatorBox[-1,1]" */
GD_API gd_status gd_function_from_json(const char* spec, gd_function** out);
GD_API void gd_function_free(gd_function* f);
GD_API gd_status gd_function_dim(const gd_function* f, size_t* out);
GD_API gd_status gd_function_eval(const gd_function* f, const double* x, size_t n, double* out);
GD_API gd_status gd_function_polar(const gd_function* f, gd_function** out);
GD_API gd_status gd_function_prox(const gd_function* f, const double* x, size_t n, double lambda, double* out);
/* Writes a CSV (y, phi_star_numeric, phi_star_closed_form, abs_diff). */
GD_API gd_status gd_conjugate_table(const gd_function* f, double lo, double hi, size_t samples, const char* out_path,
                                    double* max_abs_diff);

/* Integration */
GD_API gd_status gd_integrate(const gd_model* model, const gd_law* law, const double* z0, size_t n, double t0,
                              double t_end, double dt, double step_tol, double restitution, gd_trajectory** out);
GD_API void gd_trajectory_free(gd_trajectory* tr);
/* Number of accepted steps; there is one more state than steps. */
GD_API gd_status gd_trajectory_steps(const gd_trajectory* tr, size_t* out);
GD_API gd_status gd_trajectory_complete(const gd_trajectory* tr, int* out);
GD_API gd_status gd_trajectory_time(const gd_trajectory* tr, size_t k, double* out);
GD_API gd_status gd_trajectory_state(const gd_trajectory* tr, size_t k, double* out);
GD_API gd_status gd_trajectory_energy(const gd_trajectory* tr, size_t k, double* out);
/* Gap and residual of step k -> k + 1. */
GD_API gd_status gd_trajectory_eta(const gd_trajectory* tr, size_t k, double* out);
GD_API gd_status gd_trajectory_residual(const gd_trajectory* tr, size_t k, double* out);

/* Batch entry points */
/* Runs a scenario file. out_dir may be NULL to use the file's output.dir.
 * seed_override < 0 keeps the file's seed. exit_code receives 0 (clean),
 * 1 (invariant violations) or 3 (step failure, partial outputs written).
 * Configuration problems return GD_ERR_CONFIG. */
GD_API gd_status gd_run_scenario(const char* config_path, const char* out_dir, int64_t seed_override,
                                 int* exit_code, gd_line_sink sink, void* user);
/* Runs the property suites. mutation is NULL, "none" or "polar-sign";
 * json_path may be NULL. */
GD_API gd_status gd_validate(uint64_t seed, const char* mutation, const char* json_path, gd_line_sink sink,
                             void* user, int* passed, size_t* suite_count);

#ifdef __cplusplus
}
#endif

#endif /* GAPDYN_H */
