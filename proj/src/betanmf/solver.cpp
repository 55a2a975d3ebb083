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

#include "betanmf/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace betanmf {

namespace {

using Clock = std::chrono::steady_clock;

// Safety factor on the rounding-noise estimate below.
constexpr double kNoiseFactor = 64.0;

// Size of the rounding noise that divergence_sum leaves on an exact fit: the
// closed forms cancel terms of magnitude ~ x^beta, except beta = 2 which
// squares a difference and is only off by eps^2.
double ExactFitFloor(const Matrix& data, double beta) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (beta == 2.0) {
    return kNoiseFactor * kNoiseFactor * eps * eps * data.squaredNorm();
  }
  double magnitude = 0.0;
  if (beta == 1.0) {
    magnitude = 2.0 * data.sum();
  } else if (beta == 0.0) {
    magnitude = 2.0 * static_cast<double>(data.size());
  } else {
    const double c = 1.0 / std::abs(beta * (beta - 1.0)) + 1.0 / std::abs(beta) +
                     1.0 / std::abs(beta - 1.0);
    magnitude = c * data.array().pow(beta).sum();
  }
  return kNoiseFactor * eps * magnitude;
}

Matrix Product(const Matrix& w, const Matrix& h, double kappa) {
  Matrix out = w * h;
  if (kappa != 0.0) out.array() += kappa;
  return out;
}

class HalfNormalSource {
 public:
  explicit HalfNormalSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    for (;;) {
      const double u1 = 1.0 - Uniform();  // (0, 1]
      const double u2 = Uniform();
      const double z = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * 3.14159265358979323846 * u2);
      const double value = std::abs(z);
      if (value > 0.0) return value;
    }
  }

 private:
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
};

// Shared outer-loop bookkeeping for both algorithms.
class Recorder {
 public:
  Recorder(const Matrix& data, const SolverConfig& config, double kappa,
           FitResult& result)
      : data_(data), config_(config), result_(result) {
    result_.kappa = kappa;
    result_.trace.reserve(static_cast<std::size_t>(config.max_outer_iters));
    result_.counters.reserve(static_cast<std::size_t>(config.max_outer_iters));
    exact_fit_floor_ = ExactFitFloor(data, config.beta);
  }

  void start() { started_ = Clock::now(); }

  // Called once per outer iteration with the normalized factors and their
  // shifted product. Returns true when the loop should end.
  bool finish_iteration(const Matrix& w, const Matrix& h, const Matrix& approx,
                        const IterationCounters& counters) {
    const double objective = divergence_sum(data_, approx, config_.beta);
    elapsed_ += Clock::now() - started_;

    TraceRow row;
    row.iteration = static_cast<int>(result_.trace.size()) + 1;
    row.objective = objective;
    row.seconds = std::chrono::duration<double>(elapsed_).count();
    if (config_.trace_kkt) {
      row.kkt = kkt_residuals_from_approx(data_, w, h, approx, config_.beta);
    } else {
      row.kkt.res_w = row.kkt.res_h = std::numeric_limits<double>::quiet_NaN();
    }
    const bool converged =
        config_.check_convergence && !result_.trace.empty() &&
        (should_stop(result_.trace.back().objective, objective, config_.tol) ||
         objective <= exact_fit_floor_);
    result_.trace.push_back(row);
    result_.counters.push_back(counters);
    if (converged) result_.termination = Termination::kConverged;
    const bool done =
        converged || static_cast<int>(result_.trace.size()) >=
                         config_.max_outer_iters;
    if (!done) started_ = Clock::now();
    return done;
  }

  void finalize(Matrix w, Matrix h, const Matrix& approx) {
    result_.iterations = static_cast<int>(result_.trace.size());
    result_.objective = result_.trace.back().objective;
    result_.seconds = result_.trace.back().seconds;
    result_.kkt = config_.trace_kkt
                      ? result_.trace.back().kkt
                      : kkt_residuals_from_approx(data_, w, h, approx,
                                                  config_.beta);
    result_.factors = FactorPair{std::move(w), std::move(h)};
  }

 private:
  const Matrix& data_;
  const SolverConfig& config_;
  FitResult& result_;
  double exact_fit_floor_ = 0.0;
  Clock::time_point started_;
  Clock::duration elapsed_{};
};

struct Prepared {
  double kappa = 0.0;
  Matrix data;
  UpdateOptions options;
  bool fast = false;
};

Prepared Prepare(const DataMatrix& v, const SolverConfig& config,
                 const FactorPair& init) {
  config.validate();
  Prepared p;
  p.kappa = resolve_kappa(v, config);
  const DataMatrix shifted = v.with_kappa(p.kappa);
  shifted.check_usable_with(config.beta);
  init.validate_against(shifted);
  if (init.rank() != config.rank) {
    Fail(ErrorCode::kDimension, "initial factors have rank " +
                                    std::to_string(init.rank()) +
                                    ", config asks for " +
                                    std::to_string(config.rank));
  }
  p.data = shifted.shifted();
  p.options.kappa = p.kappa;
  p.options.floor = config.denominator_floor;
  p.options.heuristic_gamma_one = config.heuristic_gamma_one;
  p.fast = config.use_fast_path && has_fast_path(config.beta);
  return p;
}

FactorPair InitFor(const DataMatrix& v, const SolverConfig& config) {
  config.validate();
  return init_factors(v.rows(), v.cols(), config.rank, config.seed);
}

}  // namespace

void SolverConfig::validate() const {
  if (!std::isfinite(beta)) {
    Fail(ErrorCode::kInvalidArgument, "beta must be finite");
  }
  if (rank < 1) Fail(ErrorCode::kInvalidArgument, "rank must be >= 1");
  if (sub_iters < 1 || sub_iters_w < 1 || sub_iters_h < 1) {
    Fail(ErrorCode::kInvalidArgument, "sub-iteration counts must be >= 1");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    Fail(ErrorCode::kInvalidArgument, "tolerance must be a positive number");
  }
  if (kappa && (!std::isfinite(*kappa) || *kappa < 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "kappa must be finite and >= 0");
  }
  if (max_outer_iters < 1) {
    Fail(ErrorCode::kInvalidArgument, "max outer iterations must be >= 1");
  }
  if (!(denominator_floor > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "denominator floor must be positive");
  }
}

const char* termination_name(Termination termination) {
  return termination == Termination::kConverged ? "converged" : "max_iters";
}

FactorPair init_factors(Eigen::Index f, Eigen::Index n, Eigen::Index k,
                        std::uint64_t seed) {
  if (f < 1 || n < 1 || k < 1) {
    Fail(ErrorCode::kInvalidArgument, "init_factors needs positive sizes");
  }
  HalfNormalSource source(seed);
  FactorPair out{Matrix(f, k), Matrix(k, n)};
  for (Eigen::Index i = 0; i < out.w.size(); ++i) out.w.data()[i] = source.next();
  for (Eigen::Index i = 0; i < out.h.size(); ++i) out.h.data()[i] = source.next();
  return out;
}

Matrix half_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                          std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    Fail(ErrorCode::kInvalidArgument, "half_normal_matrix needs positive sizes");
  }
  HalfNormalSource source(seed);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = source.next();
  return out;
}

void normalize_in_place(Matrix& w, Matrix& h) {
  if (w.cols() != h.rows()) {
    Fail(ErrorCode::kDimension, "normalize: W and H ranks differ");
  }
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const double norm = w.col(k).norm();
    if (!(norm > 0.0)) {
      Fail(ErrorCode::kDomain,
           "normalize: column " + std::to_string(k) + " of W is zero");
    }
    w.col(k) /= norm;
    h.row(k) *= norm;
  }
}

FactorPair normalize(const FactorPair& factors) {
  FactorPair out = factors;
  normalize_in_place(out.w, out.h);
  return out;
}

bool should_stop(double prev_obj, double curr_obj, double tol) {
  return prev_obj - curr_obj <= tol * curr_obj;
}

double resolve_kappa(const DataMatrix& v, const SolverConfig& config) {
  if (config.kappa) return *config.kappa;
  if (v.kappa() > 0.0) return v.kappa();
  return default_kappa(v.values(), config.beta);
}

FitResult run_bmm(const DataMatrix& v, const SolverConfig& config) {
  return run_bmm(v, config, InitFor(v, config));
}

FitResult run_bmm(const DataMatrix& v, const SolverConfig& config,
                  const FactorPair& init) {
  const Prepared p = Prepare(v, config, init);
  const double beta = config.beta;
  const auto update_w = p.fast ? fast_bmm_update_w : bmm_update_w;
  const auto update_h = p.fast ? fast_bmm_update_h : bmm_update_h;

  FitResult result;
  Recorder recorder(p.data, config, p.kappa, result);
  Matrix w = init.w;
  Matrix h = init.h;
  Matrix approx = Product(w, h, p.kappa);
  result.initial_objective = divergence_sum(p.data, approx, beta);

  recorder.start();
  for (;;) {
    IterationCounters counters;
    for (int l = 0; l < config.sub_iters_w; ++l) {
      if (l > 0) {
        approx = Product(w, h, p.kappa);
        ++counters.products;
      }
      w = update_w(p.data, w, h, beta, p.options, &approx);
      ++counters.w_updates;
    }
    for (int l = 0; l < config.sub_iters_h; ++l) {
      approx = Product(w, h, p.kappa);
      ++counters.products;
      h = update_h(p.data, w, h, beta, p.options, &approx);
      ++counters.h_updates;
    }
    normalize_in_place(w, h);
    approx = Product(w, h, p.kappa);
    ++counters.products;
    if (recorder.finish_iteration(w, h, approx, counters)) break;
  }
  recorder.finalize(std::move(w), std::move(h), approx);
  return result;
}

FitResult run_jmm(const DataMatrix& v, const SolverConfig& config) {
  return run_jmm(v, config, InitFor(v, config));
}

FitResult run_jmm(const DataMatrix& v, const SolverConfig& config,
                  const FactorPair& init) {
  const Prepared p = Prepare(v, config, init);
  const double beta = config.beta;
  const auto update_w = p.fast ? fast_jmm_update_w : jmm_update_w;
  const auto update_h = p.fast ? fast_jmm_update_h : jmm_update_h;

  FitResult result;
  Recorder recorder(p.data, config, p.kappa, result);
  MajorizerAnchor anchor;
  anchor.kappa = p.kappa;
  anchor.w_tilde = init.w;
  anchor.h_tilde = init.h;
  anchor.v_tilde = Product(init.w, init.h, p.kappa);
  result.initial_objective = divergence_sum(p.data, anchor.v_tilde, beta);

  recorder.start();
  for (;;) {
    IterationCounters counters;
    const JmmTerms terms =
        make_jmm_terms(p.data, anchor, beta, p.fast, p.options.floor);
    Matrix w;
    Matrix h;
    for (int l = 0; l < config.sub_iters; ++l) {
      // The first W update sees H = H~ itself.
      w = update_w(p.data, anchor, l == 0 ? anchor.h_tilde : h, beta,
                   p.options, &terms);
      ++counters.w_updates;
      h = update_h(p.data, anchor, w, beta, p.options, &terms);
      ++counters.h_updates;
    }
    normalize_in_place(w, h);
    anchor.w_tilde = std::move(w);
    anchor.h_tilde = std::move(h);
    anchor.v_tilde = Product(anchor.w_tilde, anchor.h_tilde, p.kappa);
    ++counters.products;
    if (recorder.finish_iteration(anchor.w_tilde, anchor.h_tilde,
                                  anchor.v_tilde, counters)) {
      break;
    }
  }
  recorder.finalize(std::move(anchor.w_tilde), std::move(anchor.h_tilde),
                    anchor.v_tilde);
  return result;
}

FitResult fit(const DataMatrix& v, const SolverConfig& config) {
  return fit(v, config, InitFor(v, config));
}

FitResult fit(const DataMatrix& v, const SolverConfig& config,
              const FactorPair& init) {
  return config.algorithm == Algorithm::kBmm ? run_bmm(v, config, init)
                                             : run_jmm(v, config, init);
}

}  // namespace betanmf
