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

#include "betanmf/betanmf.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>

#include "betanmf/bench.hpp"
#include "betanmf/diagnostics.hpp"
#include "betanmf/io.hpp"
#include "betanmf/solver.hpp"
#include "betanmf/verify.hpp"

struct bnmf_matrix {
  betanmf::DataMatrix data;
};

struct bnmf_config {
  betanmf::SolverConfig config;
};

struct bnmf_result {
  betanmf::FitResult result;
};

struct bnmf_bench {
  betanmf::BenchReport report;
  std::string json;
};

struct bnmf_verify {
  betanmf::VerifyReport report;
  std::string table;
  std::string counterexample;
};

namespace {

thread_local std::string last_error;

bnmf_status Record(bnmf_status status, const char* what) {
  last_error = what;
  return status;
}

bnmf_status FromCode(betanmf::ErrorCode code) {
  switch (code) {
    case betanmf::ErrorCode::kInvalidArgument: return BNMF_ERR_INVALID_ARGUMENT;
    case betanmf::ErrorCode::kDomain: return BNMF_ERR_DOMAIN;
    case betanmf::ErrorCode::kDimension: return BNMF_ERR_DIMENSION;
    case betanmf::ErrorCode::kParse: return BNMF_ERR_PARSE;
    case betanmf::ErrorCode::kIo: return BNMF_ERR_IO;
    case betanmf::ErrorCode::kLimit: return BNMF_ERR_LIMIT;
  }
  return BNMF_ERR_INTERNAL;
}

template <typename Fn>
bnmf_status Guard(Fn&& fn) {
  try {
    fn();
    return BNMF_OK;
  } catch (const betanmf::Error& e) {
    return Record(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(BNMF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(BNMF_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(BNMF_ERR_INTERNAL, "unknown failure");
  }
}

bnmf_status NullArgument(const char* name) {
  return Record(BNMF_ERR_INVALID_ARGUMENT,
                (std::string("null argument: ") + name).c_str());
}

#define BNMF_REQUIRE(ptr) \
  do {                    \
    if ((ptr) == nullptr) return NullArgument(#ptr); \
  } while (0)

betanmf::Algorithm ToAlgorithm(bnmf_algorithm a) {
  return a == BNMF_ALGO_BMM ? betanmf::Algorithm::kBmm
                            : betanmf::Algorithm::kJmm;
}

const betanmf::Matrix* Factor(const bnmf_result* r, char which) {
  if (which == 'W' || which == 'w') return &r->result.factors.w;
  if (which == 'H' || which == 'h') return &r->result.factors.h;
  return nullptr;
}

void ToC(const betanmf::TimeSummary& t, bnmf_time_summary* out) {
  out->mean = t.mean;
  out->std = t.std;
  out->ci_low = t.ci_low;
  out->ci_high = t.ci_high;
}

bnmf_status CopyOut(const betanmf::Matrix& m, double* out, size_t capacity) {
  const auto size = static_cast<size_t>(m.size());
  if (capacity < size) {
    return Record(BNMF_ERR_INVALID_ARGUMENT, "output buffer too small");
  }
  std::memcpy(out, m.data(), size * sizeof(double));
  return BNMF_OK;
}

}  // namespace

extern "C" {

const char* bnmf_version(void) { return "0.1.0"; }

const char* bnmf_last_error(void) { return last_error.c_str(); }

const char* bnmf_status_string(bnmf_status status) {
  switch (status) {
    case BNMF_OK: return "ok";
    case BNMF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BNMF_ERR_DOMAIN: return "domain error";
    case BNMF_ERR_DIMENSION: return "dimension mismatch";
    case BNMF_ERR_PARSE: return "parse error";
    case BNMF_ERR_IO: return "i/o error";
    case BNMF_ERR_LIMIT: return "size limit exceeded";
    case BNMF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

bnmf_status bnmf_matrix_load(const char* path, bnmf_format format,
                             int64_t densify_limit, bnmf_matrix** out) {
  BNMF_REQUIRE(path);
  BNMF_REQUIRE(out);
  return Guard([&] {
    betanmf::MatrixFormat fmt;
    fmt.kind = format == BNMF_FORMAT_MTX ? betanmf::MatrixFormatKind::kMatrixMarket
                                         : betanmf::MatrixFormatKind::kDenseCsv;
    if (densify_limit > 0) fmt.densify_limit = densify_limit;
    *out = new bnmf_matrix{betanmf::load_matrix(path, fmt)};
  });
}

bnmf_status bnmf_matrix_from_rows(const double* values, size_t rows,
                                  size_t cols, bnmf_matrix** out) {
  BNMF_REQUIRE(values);
  BNMF_REQUIRE(out);
  return Guard([&] {
    betanmf::Matrix m(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
    std::memcpy(m.data(), values, rows * cols * sizeof(double));
    *out = new bnmf_matrix{betanmf::DataMatrix(std::move(m))};
  });
}

bnmf_status bnmf_matrix_synthetic(size_t rows, size_t cols, size_t rank,
                                  double noise, uint64_t seed,
                                  bnmf_matrix** out) {
  BNMF_REQUIRE(out);
  return Guard([&] {
    betanmf::SyntheticSpec spec;
    spec.rows = static_cast<Eigen::Index>(rows);
    spec.cols = static_cast<Eigen::Index>(cols);
    spec.rank = static_cast<Eigen::Index>(rank);
    spec.noise = noise;
    spec.seed = seed;
    *out = new bnmf_matrix{betanmf::make_synthetic(spec)};
  });
}

size_t bnmf_matrix_rows(const bnmf_matrix* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->data.rows());
}

size_t bnmf_matrix_cols(const bnmf_matrix* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->data.cols());
}

int bnmf_matrix_has_zeros(const bnmf_matrix* m) {
  return m != nullptr && m->data.has_zeros() ? 1 : 0;
}

bnmf_status bnmf_matrix_copy(const bnmf_matrix* m, double* out,
                             size_t capacity) {
  BNMF_REQUIRE(m);
  BNMF_REQUIRE(out);
  return CopyOut(m->data.values(), out, capacity);
}

bnmf_status bnmf_matrix_save_csv(const bnmf_matrix* m, const char* path) {
  BNMF_REQUIRE(m);
  BNMF_REQUIRE(path);
  return Guard([&] { betanmf::save_matrix_csv(m->data.values(), path); });
}

void bnmf_matrix_free(bnmf_matrix* m) { delete m; }

bnmf_status bnmf_config_create(bnmf_config** out) {
  BNMF_REQUIRE(out);
  return Guard([&] { *out = new bnmf_config{}; });
}

void bnmf_config_free(bnmf_config* config) { delete config; }

bnmf_status bnmf_config_set_beta(bnmf_config* config, double beta) {
  BNMF_REQUIRE(config);
  config->config.beta = beta;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_rank(bnmf_config* config, int rank) {
  BNMF_REQUIRE(config);
  config->config.rank = rank;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_algorithm(bnmf_config* config,
                                      bnmf_algorithm algorithm) {
  BNMF_REQUIRE(config);
  if (algorithm != BNMF_ALGO_BMM && algorithm != BNMF_ALGO_JMM) {
    return Record(BNMF_ERR_INVALID_ARGUMENT, "unknown algorithm");
  }
  config->config.algorithm = ToAlgorithm(algorithm);
  return BNMF_OK;
}

bnmf_status bnmf_config_set_sub_iters(bnmf_config* config, int sub_iters) {
  BNMF_REQUIRE(config);
  config->config.sub_iters = sub_iters;
  config->config.sub_iters_w = sub_iters;
  config->config.sub_iters_h = sub_iters;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_bmm_sub_iters(bnmf_config* config, int sub_iters_w,
                                          int sub_iters_h) {
  BNMF_REQUIRE(config);
  config->config.sub_iters_w = sub_iters_w;
  config->config.sub_iters_h = sub_iters_h;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_tol(bnmf_config* config, double tol) {
  BNMF_REQUIRE(config);
  config->config.tol = tol;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_kappa(bnmf_config* config, double kappa) {
  BNMF_REQUIRE(config);
  config->config.kappa = kappa;
  return BNMF_OK;
}

bnmf_status bnmf_config_clear_kappa(bnmf_config* config) {
  BNMF_REQUIRE(config);
  config->config.kappa.reset();
  return BNMF_OK;
}

bnmf_status bnmf_config_set_max_iters(bnmf_config* config, int max_iters) {
  BNMF_REQUIRE(config);
  config->config.max_outer_iters = max_iters;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_seed(bnmf_config* config, uint64_t seed) {
  BNMF_REQUIRE(config);
  config->config.seed = seed;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_heuristic_gamma_one(bnmf_config* config,
                                                int enabled) {
  BNMF_REQUIRE(config);
  config->config.heuristic_gamma_one = enabled != 0;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_fast_path(bnmf_config* config, int enabled) {
  BNMF_REQUIRE(config);
  config->config.use_fast_path = enabled != 0;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_denominator_floor(bnmf_config* config,
                                              double floor) {
  BNMF_REQUIRE(config);
  config->config.denominator_floor = floor;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_check_convergence(bnmf_config* config,
                                              int enabled) {
  BNMF_REQUIRE(config);
  config->config.check_convergence = enabled != 0;
  return BNMF_OK;
}

bnmf_status bnmf_config_set_trace_kkt(bnmf_config* config, int enabled) {
  BNMF_REQUIRE(config);
  config->config.trace_kkt = enabled != 0;
  return BNMF_OK;
}

bnmf_status bnmf_resolve_kappa(const bnmf_matrix* m, const bnmf_config* config,
                               double* out) {
  BNMF_REQUIRE(m);
  BNMF_REQUIRE(config);
  BNMF_REQUIRE(out);
  return Guard([&] { *out = betanmf::resolve_kappa(m->data, config->config); });
}

bnmf_status bnmf_fit(const bnmf_matrix* m, const bnmf_config* config,
                     bnmf_result** out) {
  BNMF_REQUIRE(m);
  BNMF_REQUIRE(config);
  BNMF_REQUIRE(out);
  return Guard(
      [&] { *out = new bnmf_result{betanmf::fit(m->data, config->config)}; });
}

bnmf_termination bnmf_result_termination(const bnmf_result* r) {
  return r != nullptr &&
                 r->result.termination == betanmf::Termination::kConverged
             ? BNMF_CONVERGED
             : BNMF_MAX_ITERS;
}

int bnmf_result_iterations(const bnmf_result* r) {
  return r == nullptr ? 0 : r->result.iterations;
}

double bnmf_result_objective(const bnmf_result* r) {
  return r == nullptr ? 0.0 : r->result.objective;
}

double bnmf_result_initial_objective(const bnmf_result* r) {
  return r == nullptr ? 0.0 : r->result.initial_objective;
}

double bnmf_result_kappa(const bnmf_result* r) {
  return r == nullptr ? 0.0 : r->result.kappa;
}

double bnmf_result_seconds(const bnmf_result* r) {
  return r == nullptr ? 0.0 : r->result.seconds;
}

void bnmf_result_kkt(const bnmf_result* r, double* res_w, double* res_h) {
  if (r == nullptr) return;
  if (res_w != nullptr) *res_w = r->result.kkt.res_w;
  if (res_h != nullptr) *res_h = r->result.kkt.res_h;
}

size_t bnmf_result_trace_length(const bnmf_result* r) {
  return r == nullptr ? 0 : r->result.trace.size();
}

bnmf_status bnmf_result_trace_row(const bnmf_result* r, size_t index,
                                  bnmf_trace_row* out) {
  BNMF_REQUIRE(r);
  BNMF_REQUIRE(out);
  if (index >= r->result.trace.size()) {
    return Record(BNMF_ERR_INVALID_ARGUMENT, "trace index out of range");
  }
  const betanmf::TraceRow& row = r->result.trace[index];
  *out = bnmf_trace_row{row.iteration, row.objective, row.seconds,
                        row.kkt.res_w, row.kkt.res_h};
  return BNMF_OK;
}

bnmf_status bnmf_result_factor_shape(const bnmf_result* r, char which,
                                     size_t* rows, size_t* cols) {
  BNMF_REQUIRE(r);
  BNMF_REQUIRE(rows);
  BNMF_REQUIRE(cols);
  const betanmf::Matrix* m = Factor(r, which);
  if (m == nullptr) return Record(BNMF_ERR_INVALID_ARGUMENT, "factor must be 'W' or 'H'");
  *rows = static_cast<size_t>(m->rows());
  *cols = static_cast<size_t>(m->cols());
  return BNMF_OK;
}

bnmf_status bnmf_result_copy_factor(const bnmf_result* r, char which,
                                    double* out, size_t capacity) {
  BNMF_REQUIRE(r);
  BNMF_REQUIRE(out);
  const betanmf::Matrix* m = Factor(r, which);
  if (m == nullptr) return Record(BNMF_ERR_INVALID_ARGUMENT, "factor must be 'W' or 'H'");
  return CopyOut(*m, out, capacity);
}

bnmf_status bnmf_result_save_factors(const bnmf_result* r, const char* dir) {
  BNMF_REQUIRE(r);
  BNMF_REQUIRE(dir);
  return Guard([&] { betanmf::save_factors(r->result, dir); });
}

bnmf_status bnmf_result_save_trace(const bnmf_result* r, const char* path) {
  BNMF_REQUIRE(r);
  BNMF_REQUIRE(path);
  return Guard([&] { betanmf::save_trace(r->result, path); });
}

void bnmf_result_free(bnmf_result* r) { delete r; }

bnmf_status bnmf_predicted_savings(int64_t f, int64_t n, int64_t k, int64_t l,
                                   double beta, bnmf_savings* out) {
  BNMF_REQUIRE(out);
  return Guard([&] {
    const betanmf::SavingsReport s = betanmf::predicted_savings(f, n, k, l, beta);
    *out = bnmf_savings{s.mult_diff, s.div_diff, s.add_diff};
  });
}

bnmf_status bnmf_summarize(const double* values, size_t n,
                           bnmf_time_summary* out) {
  BNMF_REQUIRE(out);
  if (n > 0) BNMF_REQUIRE(values);
  return Guard([&] {
    ToC(betanmf::summarize(std::span<const double>(values, n)), out);
  });
}

bnmf_status bnmf_bench_run(const bnmf_matrix* m, const bnmf_config* config,
                           const uint64_t* seeds, size_t n_seeds,
                           const bnmf_algorithm* algos, size_t n_algos,
                           int jobs, bnmf_bench** out) {
  BNMF_REQUIRE(m);
  BNMF_REQUIRE(config);
  BNMF_REQUIRE(seeds);
  BNMF_REQUIRE(algos);
  BNMF_REQUIRE(out);
  return Guard([&] {
    betanmf::BenchOptions options;
    options.seeds.assign(seeds, seeds + n_seeds);
    options.algorithms.clear();
    for (size_t i = 0; i < n_algos; ++i) {
      options.algorithms.push_back(ToAlgorithm(algos[i]));
    }
    options.jobs = jobs;
    auto bench = new bnmf_bench{betanmf::run_bench(m->data, config->config, options), {}};
    bench->json = betanmf::to_json(bench->report).dump(2);
    *out = bench;
  });
}

bnmf_status bnmf_bench_stats(const bnmf_bench* b, bnmf_algorithm algo,
                             bnmf_algorithm_stats* out) {
  BNMF_REQUIRE(b);
  BNMF_REQUIRE(out);
  const betanmf::AlgorithmSummary* s = b->report.find(ToAlgorithm(algo));
  if (s == nullptr) {
    return Record(BNMF_ERR_INVALID_ARGUMENT, "algorithm was not part of the run");
  }
  out->runs = s->runs.size();
  ToC(s->seconds, &out->seconds);
  ToC(s->seconds_per_iteration, &out->seconds_per_iteration);
  out->mean_objective = s->mean_objective;
  out->mean_objective_normalized = s->mean_objective_normalized;
  out->mean_kkt_w = s->mean_kkt_w;
  out->mean_kkt_h = s->mean_kkt_h;
  out->mean_iterations = s->mean_iterations;
  return BNMF_OK;
}

int bnmf_bench_acceleration(const bnmf_bench* b, double* percent) {
  if (b == nullptr || !b->report.acceleration_percent) return 0;
  if (percent != nullptr) *percent = *b->report.acceleration_percent;
  return 1;
}

size_t bnmf_bench_agreement_count(const bnmf_bench* b) {
  return b == nullptr ? 0 : b->report.agreement.size();
}

double bnmf_bench_agreement_mismatch(const bnmf_bench* b, size_t index) {
  if (b == nullptr || index >= b->report.agreement.size()) return -1.0;
  return b->report.agreement[index].mismatch;
}

bnmf_status bnmf_bench_write_json(const bnmf_bench* b, const char* path) {
  BNMF_REQUIRE(b);
  BNMF_REQUIRE(path);
  return Guard([&] { betanmf::write_report(b->report, path); });
}

const char* bnmf_bench_json(const bnmf_bench* b) {
  return b == nullptr ? nullptr : b->json.c_str();
}

void bnmf_bench_free(bnmf_bench* b) { delete b; }

bnmf_status bnmf_verify_run(const double* betas, size_t n_betas, int trials,
                            uint64_t seed, bnmf_verify** out) {
  BNMF_REQUIRE(out);
  if (n_betas > 0) BNMF_REQUIRE(betas);
  return Guard([&] {
    betanmf::VerifyOptions options;
    if (n_betas > 0) options.betas.assign(betas, betas + n_betas);
    options.trials = trials;
    options.seed = seed;
    auto v = new bnmf_verify{betanmf::run_verify(options), {}, {}};
    v->table = betanmf::format_table(v->report);
    if (const auto* failure = v->report.first_failure();
        failure != nullptr && failure->counterexample) {
      v->counterexample = failure->counterexample->dump();
    }
    *out = v;
  });
}

int bnmf_verify_passed(const bnmf_verify* v) {
  return v != nullptr && v->report.passed() ? 1 : 0;
}

const char* bnmf_verify_table(const bnmf_verify* v) {
  return v == nullptr ? nullptr : v->table.c_str();
}

const char* bnmf_verify_counterexample(const bnmf_verify* v) {
  if (v == nullptr || v->counterexample.empty()) return nullptr;
  return v->counterexample.c_str();
}

void bnmf_verify_free(bnmf_verify* v) { delete v; }

}  // extern "C"
