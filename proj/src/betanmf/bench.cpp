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

#include "betanmf/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "betanmf/diagnostics.hpp"

namespace betanmf {

TimeSummary summarize(std::span<const double> values) {
  if (values.empty()) {
    Fail(ErrorCode::kInvalidArgument, "summarize needs at least one value");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double x : values) sum += x;
  TimeSummary out;
  out.mean = sum / n;
  if (values.size() > 1) {
    double sq = 0.0;
    for (double x : values) sq += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(sq / (n - 1.0));
  }
  const double half = 1.96 * out.std / std::sqrt(n);
  out.ci_low = out.mean - half;
  out.ci_high = out.mean + half;
  return out;
}

DataMatrix make_synthetic(const SyntheticSpec& spec) {
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    Fail(ErrorCode::kInvalidArgument, "synthetic noise must be >= 0");
  }
  // Separate streams so that solver seeds never reproduce the ground truth.
  const FactorPair truth = init_factors(spec.rows, spec.cols, spec.rank,
                                        spec.seed ^ 0x5851f42d4c957f2dULL);
  Matrix v = truth.w * truth.h;
  if (spec.noise > 0.0) {
    v += spec.noise *
         half_normal_matrix(spec.rows, spec.cols,
                            spec.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  return DataMatrix(std::move(v));
}

const AlgorithmSummary* BenchReport::find(Algorithm algorithm) const {
  for (const auto& a : algorithms) {
    if (a.algorithm == algorithm) return &a;
  }
  return nullptr;
}

BenchReport run_bench(const DataMatrix& v, const SolverConfig& base,
                      const BenchOptions& options) {
  base.validate();
  if (options.seeds.empty()) {
    Fail(ErrorCode::kInvalidArgument, "bench needs at least one seed");
  }
  if (options.algorithms.empty()) {
    Fail(ErrorCode::kInvalidArgument, "bench needs at least one algorithm");
  }
  if (options.jobs < 1) Fail(ErrorCode::kInvalidArgument, "jobs must be >= 1");

  BenchReport report;
  report.config = base;
  report.rows = v.rows();
  report.cols = v.cols();
  report.kappa = resolve_kappa(v, base);
  report.jobs = options.jobs;

  const std::size_t n_seeds = options.seeds.size();
  const std::size_t n_algos = options.algorithms.size();
  std::vector<FactorPair> inits(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    inits[s] = init_factors(v.rows(), v.cols(), base.rank, options.seeds[s]);
  }

  std::vector<FitResult> results(n_seeds * n_algos);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= results.size()) return;
      const std::size_t s = task / n_algos;
      const std::size_t a = task % n_algos;
      try {
        SolverConfig config = base;
        config.seed = options.seeds[s];
        config.algorithm = options.algorithms[a];
        results[task] = fit(v, config, inits[s]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (options.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < options.jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const double fn = static_cast<double>(v.rows()) * static_cast<double>(v.cols());
  for (std::size_t a = 0; a < n_algos; ++a) {
    AlgorithmSummary summary;
    summary.algorithm = options.algorithms[a];
    std::vector<double> seconds;
    std::vector<double> per_iter;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      FitResult& r = results[s * n_algos + a];
      BenchRun run;
      run.seed = options.seeds[s];
      run.iterations = r.iterations;
      run.termination = r.termination;
      run.seconds = r.seconds;
      run.seconds_per_iteration = r.seconds / r.iterations;
      run.objective = r.objective;
      run.objective_normalized = r.objective / fn;
      run.kkt = r.kkt;
      run.factors = std::move(r.factors);
      seconds.push_back(run.seconds);
      per_iter.push_back(run.seconds_per_iteration);
      summary.mean_objective += run.objective;
      summary.mean_objective_normalized += run.objective_normalized;
      summary.mean_kkt_w += run.kkt.res_w;
      summary.mean_kkt_h += run.kkt.res_h;
      summary.mean_iterations += run.iterations;
      summary.runs.push_back(std::move(run));
    }
    const double n = static_cast<double>(n_seeds);
    summary.mean_objective /= n;
    summary.mean_objective_normalized /= n;
    summary.mean_kkt_w /= n;
    summary.mean_kkt_h /= n;
    summary.mean_iterations /= n;
    summary.seconds = summarize(seconds);
    summary.seconds_per_iteration = summarize(per_iter);
    report.algorithms.push_back(std::move(summary));
  }

  const AlgorithmSummary* bmm = report.find(Algorithm::kBmm);
  const AlgorithmSummary* jmm = report.find(Algorithm::kJmm);
  if (bmm != nullptr && jmm != nullptr) {
    if (bmm->seconds.mean > 0.0) {
      report.acceleration_percent =
          100.0 * (bmm->seconds.mean - jmm->seconds.mean) / bmm->seconds.mean;
    }
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const ColumnMatch match = match_columns(bmm->runs[s].factors.w,
                                              jmm->runs[s].factors.w);
      report.agreement.push_back(
          SeedAgreement{options.seeds[s], match.permutation, match.mismatch});
    }
  }
  return report;
}

namespace {

nlohmann::json SummaryJson(const TimeSummary& t) {
  return {{"mean", t.mean}, {"std", t.std}, {"ci_low", t.ci_low},
          {"ci_high", t.ci_high}};
}

}  // namespace

nlohmann::json to_json(const BenchReport& report) {
  const SolverConfig& c = report.config;
  nlohmann::json out;
  out["config"] = {
      {"beta", c.beta},
      {"rank", c.rank},
      {"sub_iters", c.sub_iters},
      {"sub_iters_w", c.sub_iters_w},
      {"sub_iters_h", c.sub_iters_h},
      {"tol", c.tol},
      {"kappa", report.kappa},
      {"max_outer_iters", c.max_outer_iters},
      {"heuristic_gamma_one", c.heuristic_gamma_one},
      {"use_fast_path", c.use_fast_path},
      {"jobs", report.jobs},
  };
  out["data"] = {{"rows", report.rows}, {"cols", report.cols}};
  nlohmann::json algos = nlohmann::json::object();
  for (const auto& a : report.algorithms) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : a.runs) {
      runs.push_back({{"seed", r.seed},
                      {"iterations", r.iterations},
                      {"termination", termination_name(r.termination)},
                      {"seconds", r.seconds},
                      {"seconds_per_iteration", r.seconds_per_iteration},
                      {"objective", r.objective},
                      {"objective_normalized", r.objective_normalized},
                      {"kkt_w", r.kkt.res_w},
                      {"kkt_h", r.kkt.res_h}});
    }
    algos[algorithm_name(a.algorithm)] = {
        {"seconds", SummaryJson(a.seconds)},
        {"seconds_per_iteration", SummaryJson(a.seconds_per_iteration)},
        {"mean_objective", a.mean_objective},
        {"mean_objective_normalized", a.mean_objective_normalized},
        {"mean_kkt_w", a.mean_kkt_w},
        {"mean_kkt_h", a.mean_kkt_h},
        {"mean_iterations", a.mean_iterations},
        {"runs", runs},
    };
  }
  out["algorithms"] = algos;
  out["acceleration_percent"] =
      report.acceleration_percent ? nlohmann::json(*report.acceleration_percent)
                                  : nlohmann::json(nullptr);
  nlohmann::json agreement = nlohmann::json::array();
  for (const auto& g : report.agreement) {
    agreement.push_back({{"seed", g.seed},
                         {"mismatch", g.mismatch},
                         {"permutation", g.permutation}});
  }
  out["agreement"] = agreement;
  return out;
}

void write_report(const BenchReport& report,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace betanmf
