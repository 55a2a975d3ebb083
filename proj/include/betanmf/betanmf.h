// Copyright 2026 The betanmf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the betanmf solver library.
 *
 * Objects are opaque handles created by *_create / *_load / *_run functions
 * and released with the matching *_free. Every fallible call returns a
 * bnmf_status; on failure bnmf_last_error() describes the problem (the
 * message is thread-local and stays valid until the next failing call on
 * the same thread). */

#ifndef BETANMF_BETANMF_H_
#define BETANMF_BETANMF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BETANMF_BUILDING)
#define BNMF_API __declspec(dllexport)
#else
#define BNMF_API __declspec(dllimport)
#endif
#else
#define BNMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bnmf_status {
  BNMF_OK = 0,
  BNMF_ERR_INVALID_ARGUMENT = 1,
  BNMF_ERR_DOMAIN = 2, /* e.g. zeros in the data without a kappa shift */
  BNMF_ERR_DIMENSION = 3,
  BNMF_ERR_PARSE = 4,
  BNMF_ERR_IO = 5,
  BNMF_ERR_LIMIT = 6, /* densify limit exceeded */
  BNMF_ERR_INTERNAL = 7
} bnmf_status;

typedef enum bnmf_algorithm { BNMF_ALGO_BMM = 0, BNMF_ALGO_JMM = 1 } bnmf_algorithm;

typedef enum bnmf_format { BNMF_FORMAT_CSV = 0, BNMF_FORMAT_MTX = 1 } bnmf_format;

typedef enum bnmf_termination {
  BNMF_CONVERGED = 0,
  BNMF_MAX_ITERS = 1
} bnmf_termination;

typedef struct bnmf_matrix bnmf_matrix;
typedef struct bnmf_config bnmf_config;
typedef struct bnmf_result bnmf_result;
typedef struct bnmf_bench bnmf_bench;
typedef struct bnmf_verify bnmf_verify;

typedef struct bnmf_trace_row {
  int iteration;
  double objective;
  double seconds;
  double kkt_w;
  double kkt_h;
} bnmf_trace_row;

typedef struct bnmf_time_summary {
  double mean;
  double std;
  double ci_low;
  double ci_high;
} bnmf_time_summary;

typedef struct bnmf_savings {
  int64_t mult_diff;
  int64_t div_diff;
  int64_t add_diff;
} bnmf_savings;

typedef struct bnmf_algorithm_stats {
  size_t runs;
  bnmf_time_summary seconds;
  bnmf_time_summary seconds_per_iteration;
  double mean_objective;
  double mean_objective_normalized;
  double mean_kkt_w;
  double mean_kkt_h;
  double mean_iterations;
} bnmf_algorithm_stats;

BNMF_API const char* bnmf_version(void);
BNMF_API const char* bnmf_last_error(void);
BNMF_API const char* bnmf_status_string(bnmf_status status);

/* ---- data matrices ---------------------------------------------------- */

/* densify_limit <= 0 selects the default of 1e8 entries. */
BNMF_API bnmf_status bnmf_matrix_load(const char* path, bnmf_format format,
                                      int64_t densify_limit, bnmf_matrix** out);
/* values holds rows * cols entries in row-major order. */
BNMF_API bnmf_status bnmf_matrix_from_rows(const double* values, size_t rows,
                                           size_t cols, bnmf_matrix** out);
/* V = W* H* + |noise * z| with half-normal W*, H*. */
BNMF_API bnmf_status bnmf_matrix_synthetic(size_t rows, size_t cols, size_t rank,
                                           double noise, uint64_t seed,
                                           bnmf_matrix** out);
BNMF_API size_t bnmf_matrix_rows(const bnmf_matrix* m);
BNMF_API size_t bnmf_matrix_cols(const bnmf_matrix* m);
BNMF_API int bnmf_matrix_has_zeros(const bnmf_matrix* m);
BNMF_API bnmf_status bnmf_matrix_copy(const bnmf_matrix* m, double* out,
                                      size_t capacity);
BNMF_API bnmf_status bnmf_matrix_save_csv(const bnmf_matrix* m, const char* path);
BNMF_API void bnmf_matrix_free(bnmf_matrix* m);

/* ---- solver configuration --------------------------------------------- */

/* Defaults: beta 1, rank 1, JMM, L = L_W = L_H = 1, tol 1e-5, automatic
 * kappa, 5000 outer iterations, seed 0, heuristic off, fast paths on. */
BNMF_API bnmf_status bnmf_config_create(bnmf_config** out);
BNMF_API void bnmf_config_free(bnmf_config* config);
BNMF_API bnmf_status bnmf_config_set_beta(bnmf_config* config, double beta);
BNMF_API bnmf_status bnmf_config_set_rank(bnmf_config* config, int rank);
BNMF_API bnmf_status bnmf_config_set_algorithm(bnmf_config* config,
                                               bnmf_algorithm algorithm);
/* Sets L for JMM and L_W = L_H for BMM. */
BNMF_API bnmf_status bnmf_config_set_sub_iters(bnmf_config* config, int sub_iters);
BNMF_API bnmf_status bnmf_config_set_bmm_sub_iters(bnmf_config* config,
                                                   int sub_iters_w,
                                                   int sub_iters_h);
BNMF_API bnmf_status bnmf_config_set_tol(bnmf_config* config, double tol);
BNMF_API bnmf_status bnmf_config_set_kappa(bnmf_config* config, double kappa);
BNMF_API bnmf_status bnmf_config_clear_kappa(bnmf_config* config);
BNMF_API bnmf_status bnmf_config_set_max_iters(bnmf_config* config, int max_iters);
BNMF_API bnmf_status bnmf_config_set_seed(bnmf_config* config, uint64_t seed);
BNMF_API bnmf_status bnmf_config_set_heuristic_gamma_one(bnmf_config* config,
                                                         int enabled);
BNMF_API bnmf_status bnmf_config_set_fast_path(bnmf_config* config, int enabled);
BNMF_API bnmf_status bnmf_config_set_denominator_floor(bnmf_config* config,
                                                       double floor);
BNMF_API bnmf_status bnmf_config_set_check_convergence(bnmf_config* config,
                                                       int enabled);
BNMF_API bnmf_status bnmf_config_set_trace_kkt(bnmf_config* config, int enabled);

/* Kappa the solver would use for this data and configuration. */
BNMF_API bnmf_status bnmf_resolve_kappa(const bnmf_matrix* m,
                                        const bnmf_config* config, double* out);

/* ---- fitting ----------------------------------------------------------- */

BNMF_API bnmf_status bnmf_fit(const bnmf_matrix* m, const bnmf_config* config,
                              bnmf_result** out);
BNMF_API bnmf_termination bnmf_result_termination(const bnmf_result* r);
BNMF_API int bnmf_result_iterations(const bnmf_result* r);
BNMF_API double bnmf_result_objective(const bnmf_result* r);
BNMF_API double bnmf_result_initial_objective(const bnmf_result* r);
BNMF_API double bnmf_result_kappa(const bnmf_result* r);
BNMF_API double bnmf_result_seconds(const bnmf_result* r);
BNMF_API void bnmf_result_kkt(const bnmf_result* r, double* res_w, double* res_h);
BNMF_API size_t bnmf_result_trace_length(const bnmf_result* r);
BNMF_API bnmf_status bnmf_result_trace_row(const bnmf_result* r, size_t index,
                                           bnmf_trace_row* out);
/* which is 'W' or 'H'. */
BNMF_API bnmf_status bnmf_result_factor_shape(const bnmf_result* r, char which,
                                              size_t* rows, size_t* cols);
BNMF_API bnmf_status bnmf_result_copy_factor(const bnmf_result* r, char which,
                                             double* out, size_t capacity);
BNMF_API bnmf_status bnmf_result_save_factors(const bnmf_result* r,
                                              const char* dir);
BNMF_API bnmf_status bnmf_result_save_trace(const bnmf_result* r,
                                            const char* path);
BNMF_API void bnmf_result_free(bnmf_result* r);

/* ---- diagnostics ------------------------------------------------------- */

BNMF_API bnmf_status bnmf_predicted_savings(int64_t f, int64_t n, int64_t k,
                                            int64_t l, double beta,
                                            bnmf_savings* out);
BNMF_API bnmf_status bnmf_summarize(const double* values, size_t n,
                                    bnmf_time_summary* out);

/* ---- multi-seed comparison -------------------------------------------- */

/* Runs every algorithm in algos from the same initial factors for each
 * seed. jobs = 1 keeps all fits on the calling thread. */
BNMF_API bnmf_status bnmf_bench_run(const bnmf_matrix* m,
                                    const bnmf_config* config,
                                    const uint64_t* seeds, size_t n_seeds,
                                    const bnmf_algorithm* algos, size_t n_algos,
                                    int jobs, bnmf_bench** out);
BNMF_API bnmf_status bnmf_bench_stats(const bnmf_bench* b, bnmf_algorithm algo,
                                      bnmf_algorithm_stats* out);
/* Returns 1 and writes the acceleration in percent when both algorithms ran. */
BNMF_API int bnmf_bench_acceleration(const bnmf_bench* b, double* percent);
BNMF_API size_t bnmf_bench_agreement_count(const bnmf_bench* b);
BNMF_API double bnmf_bench_agreement_mismatch(const bnmf_bench* b, size_t index);
BNMF_API bnmf_status bnmf_bench_write_json(const bnmf_bench* b, const char* path);
/* NUL-terminated JSON report, valid until bnmf_bench_free. */
BNMF_API const char* bnmf_bench_json(const bnmf_bench* b);
BNMF_API void bnmf_bench_free(bnmf_bench* b);

/* ---- property verification -------------------------------------------- */

/* betas may be NULL (n_betas = 0) for the default grid. */
BNMF_API bnmf_status bnmf_verify_run(const double* betas, size_t n_betas,
                                     int trials, uint64_t seed,
                                     bnmf_verify** out);
BNMF_API int bnmf_verify_passed(const bnmf_verify* v);
BNMF_API const char* bnmf_verify_table(const bnmf_verify* v);
/* JSON describing the first failing instance, or NULL when all passed. */
BNMF_API const char* bnmf_verify_counterexample(const bnmf_verify* v);
BNMF_API void bnmf_verify_free(bnmf_verify* v);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BETANMF_BETANMF_H_ */
