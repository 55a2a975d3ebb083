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

#ifndef BETANMF_SOLVER_HPP_
#define BETANMF_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "betanmf/core.hpp"
#include "betanmf/diagnostics.hpp"
#include "betanmf/updates.hpp"

namespace betanmf {

struct SolverConfig {
  double beta = 1.0;
  int rank = 1;
  Algorithm algorithm = Algorithm::kJmm;
  int sub_iters = 1;    // L, joint scheme
  int sub_iters_w = 1;  // L_W, block scheme
  int sub_iters_h = 1;  // L_H, block scheme
  double tol = 1e-5;
  // Unset: use the data matrix's own kappa if positive, else default_kappa.
  std::optional<double> kappa;
  int max_outer_iters = 5000;
  std::uint64_t seed = 0;
  bool heuristic_gamma_one = false;
  bool use_fast_path = true;
  double denominator_floor = kDefaultDenominatorFloor;
  // false runs exactly max_outer_iters iterations.
  bool check_convergence = true;
  // Per-iteration KKT residuals; their cost is kept out of the timings.
  bool trace_kkt = true;

  void validate() const;
};

enum class Termination { kConverged, kMaxIters };

const char* termination_name(Termination termination);

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double seconds = 0.0;  // cumulative solver time
  KktResiduals kkt;      // NaN when not traced
};

// Work done inside one outer iteration.
struct IterationCounters {
  std::size_t products = 0;  // full F x N products W * H
  std::size_t w_updates = 0;
  std::size_t h_updates = 0;
};

struct FitResult {
  FactorPair factors;
  std::vector<TraceRow> trace;
  std::vector<IterationCounters> counters;
  Termination termination = Termination::kMaxIters;
  int iterations = 0;
  double kappa = 0.0;
  double initial_objective = 0.0;
  double objective = 0.0;
  KktResiduals kkt;
  double seconds = 0.0;
};

// Half-normal entries |z|, z standard normal. z comes from a Box-Muller
// transform of two uniforms drawn from std::mt19937_64(seed), each uniform
// being (u >> 11) * 2^-53 taken as 1 - that value for the logarithm. W is
// filled row by row first, then H. Exact zeros are redrawn.
FactorPair init_factors(Eigen::Index f, Eigen::Index n, Eigen::Index k,
                        std::uint64_t seed);
// rows x cols half-normal matrix from the same generator.
Matrix half_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                          std::uint64_t seed);

// Unit l2 columns for W, rows of H scaled to keep W * H.
FactorPair normalize(const FactorPair& factors);
void normalize_in_place(Matrix& w, Matrix& h);

// Relative decrease test (prev - curr) / curr <= tol, written without the
// division so that a zero objective counts as converged.
bool should_stop(double prev_obj, double curr_obj, double tol);

double resolve_kappa(const DataMatrix& v, const SolverConfig& config);

FitResult run_bmm(const DataMatrix& v, const SolverConfig& config);
FitResult run_bmm(const DataMatrix& v, const SolverConfig& config,
                  const FactorPair& init);
FitResult run_jmm(const DataMatrix& v, const SolverConfig& config);
FitResult run_jmm(const DataMatrix& v, const SolverConfig& config,
                  const FactorPair& init);

// Dispatches on config.algorithm.
FitResult fit(const DataMatrix& v, const SolverConfig& config);
FitResult fit(const DataMatrix& v, const SolverConfig& config,
              const FactorPair& init);

}  // namespace betanmf

#endif  // BETANMF_SOLVER_HPP_
