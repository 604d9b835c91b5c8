/*
 * Copyright 2026 The dpfusion Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libdpfusion: steady-state multi-sensor Kalman fusion with
 * local differential privacy calibration.
 *
 * Conventions:
 *  - Every fallible call returns a dpf_status; on failure dpf_last_error()
 *    holds a message for the calling thread until its next failing call.
 *  - Handles are opaque, created by the library and released with the
 *    matching *_free function (NULL is accepted).
 *  - Sensor indices are zero-based. Matrices are copied out row-major.
 *  - Buffer-filling calls take (out, capacity). With out == NULL they only
 *    report the required size; with a short buffer they return
 *    DPF_ERR_BUFFER_TOO_SMALL and write nothing.
 */

#ifndef DPFUSION_DPFUSION_H_
#define DPFUSION_DPFUSION_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DPF_BUILDING_LIBRARY)
#define DPF_API __declspec(dllexport)
#else
#define DPF_API __declspec(dllimport)
#endif
#else
#define DPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpf_status {
  DPF_OK = 0,
  DPF_ERR_INVALID_INPUT = 1,
  DPF_ERR_SINGULAR_MATRIX = 2,
  DPF_ERR_CONVERGENCE = 3,
  DPF_ERR_BUDGET_OUT_OF_RANGE = 4,
  DPF_ERR_PARSE = 5,
  DPF_ERR_NULL_ARGUMENT = 6,
  DPF_ERR_BUFFER_TOO_SMALL = 7,
  DPF_ERR_OUT_OF_RANGE = 8,
  DPF_ERR_INTERNAL = 9
} dpf_status;

typedef struct dpf_config dpf_config;
typedef struct dpf_calibration dpf_calibration;
typedef struct dpf_simulation dpf_simulation;
typedef struct dpf_privacy_report dpf_privacy_report;

DPF_API const char* dpf_version(void);
DPF_API const char* dpf_status_name(dpf_status status);
DPF_API const char* dpf_last_error(void);

/* ---- configuration ---------------------------------------------------- */

DPF_API dpf_status dpf_config_load_file(const char* path, dpf_config** out);
DPF_API dpf_status dpf_config_parse(const char* yaml_text, dpf_config** out);
/* name: "oxygen" or "tracking". */
DPF_API dpf_status dpf_config_builtin(const char* name, dpf_config** out);
DPF_API void dpf_config_free(dpf_config* config);

typedef struct dpf_run_settings {
  uint64_t seed;
  int32_t runs;
  int32_t horizon;
  int32_t burn_in;
  int32_t threads;
  int64_t privacy_samples;
  double epsilon;
  double delta;
  double zeta_margin;
  int32_t has_forced_q_a;
  double forced_q_a;
  int32_t state_dim;
  int32_t num_sensors;
} dpf_run_settings;

DPF_API dpf_status dpf_config_get_settings(const dpf_config* config,
                                           dpf_run_settings* out);
DPF_API dpf_status dpf_config_set_seed(dpf_config* config, uint64_t seed);
DPF_API dpf_status dpf_config_set_runs(dpf_config* config, int32_t runs);
DPF_API dpf_status dpf_config_set_horizon(dpf_config* config, int32_t horizon);
DPF_API dpf_status dpf_config_set_threads(dpf_config* config, int32_t threads);
DPF_API dpf_status dpf_config_set_budget(dpf_config* config, double epsilon,
                                         double delta);
DPF_API dpf_status dpf_config_set_zeta_margin(dpf_config* config,
                                              double zeta_margin);
/* Replaces the calibrated q_a downstream; negative values are rejected. */
DPF_API dpf_status dpf_config_set_forced_q_a(dpf_config* config, double q_a);
DPF_API dpf_status dpf_config_set_privacy_samples(dpf_config* config,
                                                  int64_t samples);

/* Canonical JSON description (NUL-terminated) of everything that determines
 * numeric output. *needed receives the size including the terminator. */
DPF_API dpf_status dpf_config_describe(const dpf_config* config, char* out,
                                       size_t capacity, size_t* needed);
/* 16 hex digits + NUL. */
DPF_API dpf_status dpf_config_hash(const dpf_config* config, char out[17]);
/* Scenario name ("oxygen", "tracking" or "inline"), NUL-terminated. */
DPF_API dpf_status dpf_config_name(const dpf_config* config, char* out,
                                   size_t capacity, size_t* needed);

/* ---- validation ------------------------------------------------------- */

typedef struct dpf_validation_report {
  int32_t state_dim;
  int32_t num_sensors;
  int32_t controllability_rank;
  int32_t observability_rank;
  int32_t process_noise_psd;
  int32_t measurement_noise_psd;     /* all sensors */
  int32_t effective_noise_full_rank; /* all sensors */
  int32_t accepted;
} dpf_validation_report;

/* issues (optional) receives newline-separated diagnostics. */
DPF_API dpf_status dpf_validate(const dpf_config* config,
                                dpf_validation_report* report, char* issues,
                                size_t capacity, size_t* needed);

/* ---- calibration ------------------------------------------------------ */

typedef enum dpf_mechanism_kind {
  DPF_MECHANISM_INTRINSIC = 0,
  DPF_MECHANISM_GAUSSIAN = 1
} dpf_mechanism_kind;

typedef struct dpf_calibration_summary {
  int32_t state_dim;
  int32_t num_sensors;
  double delta2;
  double p_min;
  double p_max;
  double threshold;
  dpf_mechanism_kind kind;
  double q_a;
  double zeta;
  double zeta_bound;
  double applied_q_a;
  double max_riccati_residual;
  double max_cross_residual;
  double fused_trace;
  double perturbed_fused_trace;
  int32_t weights_jittered;
} dpf_calibration_summary;

typedef enum dpf_matrix_id {
  DPF_MATRIX_P_PRED = 0,           /* sensor i */
  DPF_MATRIX_GAIN = 1,             /* sensor i */
  DPF_MATRIX_P_EST = 2,            /* sensor i */
  DPF_MATRIX_CROSS = 3,            /* pair (i, j) */
  DPF_MATRIX_STACKED = 4,
  DPF_MATRIX_WEIGHT = 5,           /* block i */
  DPF_MATRIX_PERTURBED_WEIGHT = 6, /* block i */
  DPF_MATRIX_FUSED_COV = 7,
  DPF_MATRIX_PERTURBED_FUSED_COV = 8
} dpf_matrix_id;

DPF_API dpf_status dpf_calibrate(const dpf_config* config,
                                 dpf_calibration** out);
DPF_API void dpf_calibration_free(dpf_calibration* calibration);
DPF_API dpf_status dpf_calibration_get_summary(
    const dpf_calibration* calibration, dpf_calibration_summary* out);
/* Indices not used by `id` are ignored. */
DPF_API dpf_status dpf_calibration_matrix(const dpf_calibration* calibration,
                                          dpf_matrix_id id, int32_t i,
                                          int32_t j, double* out,
                                          size_t capacity, int32_t* rows,
                                          int32_t* cols);

/* ---- privacy ---------------------------------------------------------- */

typedef struct dpf_privacy_summary {
  int64_t samples;
  int32_t num_pairs;
  double epsilon;
  double delta;
  double q_a;
  double max_fraction;
  double limit;
  int32_t pass;
} dpf_privacy_summary;

typedef struct dpf_pair_exceedance {
  int32_t i;
  int32_t j;
  int64_t samples;
  int64_t exceedances;
  double fraction;
  /* Exact probability of the exceedance region for scalar states; NaN
   * otherwise. */
  double analytic_fraction;
} dpf_pair_exceedance;

DPF_API dpf_status dpf_privacy_check(const dpf_config* config,
                                     const dpf_calibration* calibration,
                                     dpf_privacy_report** out);
DPF_API void dpf_privacy_report_free(dpf_privacy_report* report);
DPF_API dpf_status dpf_privacy_get_summary(const dpf_privacy_report* report,
                                           dpf_privacy_summary* out);
DPF_API dpf_status dpf_privacy_get_pair(const dpf_privacy_report* report,
                                        int32_t index,
                                        dpf_pair_exceedance* out);
/* Scalar states only: exceedance intervals of pair `index` as consecutive
 * (lower, upper) values of X - x; `capacity` and *count are in intervals.
 * Bounds may be +/-infinity. */
DPF_API dpf_status dpf_privacy_pair_regions(const dpf_privacy_report* report,
                                            int32_t index, double* out,
                                            size_t capacity, size_t* count);

/* ---- simulation ------------------------------------------------------- */

typedef struct dpf_steady_summary {
  double steady_rmse;
  double std_error;
  double steady_mse;
  double predicted_mse;
} dpf_steady_summary;

DPF_API dpf_status dpf_simulate(const dpf_config* config,
                                const dpf_calibration* calibration,
                                dpf_simulation** out);
DPF_API void dpf_simulation_free(dpf_simulation* simulation);
DPF_API int32_t dpf_simulation_num_steps(const dpf_simulation* simulation);
DPF_API int32_t dpf_simulation_num_series(const dpf_simulation* simulation);
DPF_API int32_t dpf_simulation_state_dim(const dpf_simulation* simulation);
DPF_API dpf_status dpf_simulation_steps(const dpf_simulation* simulation,
                                        int32_t* out, size_t capacity);
/* Borrowed, valid while the simulation lives. NULL for a bad index. */
DPF_API const char* dpf_simulation_series_name(
    const dpf_simulation* simulation, int32_t series);
DPF_API dpf_status dpf_simulation_series_rmse(
    const dpf_simulation* simulation, int32_t series, double* out,
    size_t capacity);
DPF_API dpf_status dpf_simulation_series_component(
    const dpf_simulation* simulation, int32_t series, int32_t component,
    double* out, size_t capacity);
DPF_API dpf_status dpf_simulation_series_summary(
    const dpf_simulation* simulation, int32_t series, dpf_steady_summary* out);
/* Borrowed privacy report computed alongside the simulation; *out is NULL
 * when the configuration disabled it. */
DPF_API dpf_status dpf_simulation_privacy(const dpf_simulation* simulation,
                                          const dpf_privacy_report** out);

/* ---- primitives ------------------------------------------------------- */

/* |ln N(X; x, P_i) - ln N(X; x, P_j)| for n-vectors and row-major n x n
 * positive definite covariances. */
DPF_API dpf_status dpf_privacy_loss(const double* big_x, const double* x,
                                    const double* p_i, const double* p_j,
                                    int32_t n, double* out);
DPF_API dpf_status dpf_exceedance_region_1d(double p_i, double p_j,
                                            double epsilon, double* out,
                                            size_t capacity, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* DPFUSION_DPFUSION_H_ */
