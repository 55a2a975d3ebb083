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

#ifndef BETANMF_BENCH_HPP_
#define BETANMF_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "betanmf/core.hpp"
#include "betanmf/solver.hpp"

namespace betanmf {

struct TimeSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, n - 1 denominator
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Mean, sample deviation and the normal-approximation 95% interval
// mean +- 1.96 std / sqrt(n). Throws kInvalidArgument on empty input.
TimeSummary summarize(std::span<const double> values);

// V = W* H* + |noise * z| with half-normal W*, H* and standard normal z.
struct SyntheticSpec {
  Eigen::Index rows = 100;
  Eigen::Index cols = 80;
  Eigen::Index rank = 5;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

DataMatrix make_synthetic(const SyntheticSpec& spec);

struct BenchRun {
  std::uint64_t seed = 0;
  int iterations = 0;
  Termination termination = Termination::kMaxIters;
  double seconds = 0.0;
  double seconds_per_iteration = 0.0;
  double objective = 0.0;
  double objective_normalized = 0.0;  // divided by F N
  KktResiduals kkt;
  FactorPair factors;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kJmm;
  std::vector<BenchRun> runs;  // one per seed, in seed order
  TimeSummary seconds;
  TimeSummary seconds_per_iteration;
  double mean_objective = 0.0;
  double mean_objective_normalized = 0.0;
  double mean_kkt_w = 0.0;
  double mean_kkt_h = 0.0;
  double mean_iterations = 0.0;
};

struct SeedAgreement {
  std::uint64_t seed = 0;
  std::vector<int> permutation;
  double mismatch = 0.0;
};

struct BenchReport {
  SolverConfig config;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double kappa = 0.0;
  int jobs = 1;
  std::vector<AlgorithmSummary> algorithms;
  // (mean BMM seconds - mean JMM seconds) / mean BMM seconds, in percent.
  std::optional<double> acceleration_percent;
  // BMM versus JMM solutions per seed, after column matching.
  std::vector<SeedAgreement> agreement;

  const AlgorithmSummary* find(Algorithm algorithm) const;
};

struct BenchOptions {
  std::vector<std::uint64_t> seeds;
  std::vector<Algorithm> algorithms{Algorithm::kBmm, Algorithm::kJmm};
  int jobs = 1;  // 1 runs every fit sequentially on the calling thread
};

// Every algorithm starts from the same init_factors(seed) output. Fits may
// run on `jobs` worker threads; the report is assembled in seed order.
BenchReport run_bench(const DataMatrix& v, const SolverConfig& base,
                      const BenchOptions& options);

nlohmann::json to_json(const BenchReport& report);
void write_report(const BenchReport& report, const std::filesystem::path& path);

}  // namespace betanmf

#endif  // BETANMF_BENCH_HPP_
