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

// betanmf command-line tool: fit, bench and verify subcommands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "betanmf/betanmf.h"

namespace {

struct MatrixDeleter {
  void operator()(bnmf_matrix* m) const { bnmf_matrix_free(m); }
};
struct ConfigDeleter {
  void operator()(bnmf_config* c) const { bnmf_config_free(c); }
};
struct ResultDeleter {
  void operator()(bnmf_result* r) const { bnmf_result_free(r); }
};
struct BenchDeleter {
  void operator()(bnmf_bench* b) const { bnmf_bench_free(b); }
};
struct VerifyDeleter {
  void operator()(bnmf_verify* v) const { bnmf_verify_free(v); }
};

using MatrixPtr = std::unique_ptr<bnmf_matrix, MatrixDeleter>;
using ConfigPtr = std::unique_ptr<bnmf_config, ConfigDeleter>;

// Thrown on a failing C call; carries the library message.
struct CallFailed {
  std::string message;
};

void Check(bnmf_status status) {
  if (status != BNMF_OK) {
    throw CallFailed{std::string(bnmf_status_string(status)) + ": " +
                     bnmf_last_error()};
  }
}

struct DataFlags {
  std::string input;
  std::string format = "csv";
  std::string synthetic;
  uint64_t synthetic_seed = 0;
};

struct FitFlags {
  double beta = 1.0;
  int rank = 0;
  std::string algo = "jmm";
  int sub_iters = 1;
  double tol = 1e-5;
  std::optional<double> kappa;
  uint64_t seed = 0;
  int max_iters = 5000;
  bool heuristic = false;
};

void AddDataFlags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--input", d.input, "Data matrix file");
  cmd->add_option("--format", d.format, "Input format")
      ->check(CLI::IsMember({"csv", "mtx"}));
  cmd->add_option("--synthetic", d.synthetic,
                  "Generate F,N,K,noise low-rank data instead of --input");
  cmd->add_option("--synthetic-seed", d.synthetic_seed,
                  "Seed for --synthetic data");
}

void AddFitFlags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--beta", f.beta, "Beta-divergence parameter")->required();
  cmd->add_option("--rank", f.rank, "Factorization rank K")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--algo", f.algo, "Update scheme")
      ->check(CLI::IsMember({"bmm", "jmm"}));
  cmd->add_option("--sub-iters", f.sub_iters, "Inner sub-iterations L")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Relative objective decrease tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--kappa", f.kappa, "Shift added to V and WH");
  cmd->add_option("--seed", f.seed, "Initialization seed");
  cmd->add_option("--max-iters", f.max_iters, "Outer iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--heuristic-gamma-one", f.heuristic,
                "Use exponent 1 for every beta");
}

MatrixPtr LoadData(const DataFlags& d) {
  bnmf_matrix* m = nullptr;
  if (!d.synthetic.empty()) {
    std::vector<double> parts;
    std::stringstream ss(d.synthetic);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        parts.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw CallFailed{"--synthetic expects F,N,K,noise"};
      }
    }
    if (parts.size() != 4 || parts[0] < 1 || parts[1] < 1 || parts[2] < 1 ||
        parts[0] != std::floor(parts[0]) || parts[1] != std::floor(parts[1]) ||
        parts[2] != std::floor(parts[2]) || !(parts[3] >= 0)) {
      throw CallFailed{"--synthetic expects F,N,K,noise"};
    }
    Check(bnmf_matrix_synthetic(static_cast<size_t>(parts[0]),
                                static_cast<size_t>(parts[1]),
                                static_cast<size_t>(parts[2]), parts[3],
                                d.synthetic_seed, &m));
  } else {
    if (d.input.empty()) throw CallFailed{"one of --input or --synthetic is required"};
    const bnmf_format fmt = d.format == "mtx" ? BNMF_FORMAT_MTX : BNMF_FORMAT_CSV;
    Check(bnmf_matrix_load(d.input.c_str(), fmt, 0, &m));
  }
  return MatrixPtr(m);
}

ConfigPtr MakeConfig(const FitFlags& f, const bnmf_matrix* data) {
  if (!f.kappa && f.beta < 1.0 && bnmf_matrix_has_zeros(data)) {
    throw CallFailed{
        "the data contains zeros and beta < 1 makes the divergence undefined "
        "there; pass --kappa with a small positive shift (e.g. --kappa 1e-9)"};
  }
  bnmf_config* c = nullptr;
  Check(bnmf_config_create(&c));
  ConfigPtr config(c);
  Check(bnmf_config_set_beta(c, f.beta));
  Check(bnmf_config_set_rank(c, f.rank));
  Check(bnmf_config_set_algorithm(c, f.algo == "bmm" ? BNMF_ALGO_BMM : BNMF_ALGO_JMM));
  Check(bnmf_config_set_sub_iters(c, f.sub_iters));
  Check(bnmf_config_set_tol(c, f.tol));
  if (f.kappa) Check(bnmf_config_set_kappa(c, *f.kappa));
  Check(bnmf_config_set_seed(c, f.seed));
  Check(bnmf_config_set_max_iters(c, f.max_iters));
  Check(bnmf_config_set_heuristic_gamma_one(c, f.heuristic ? 1 : 0));
  return config;
}

int RunFit(const DataFlags& d, const FitFlags& f, const std::string& out) {
  MatrixPtr data = LoadData(d);
  ConfigPtr config = MakeConfig(f, data.get());
  bnmf_result* raw = nullptr;
  Check(bnmf_fit(data.get(), config.get(), &raw));
  std::unique_ptr<bnmf_result, ResultDeleter> result(raw);
  Check(bnmf_result_save_factors(raw, out.c_str()));
  Check(bnmf_result_save_trace(raw, (out + "/trace.csv").c_str()));
  double kw = 0.0;
  double kh = 0.0;
  bnmf_result_kkt(raw, &kw, &kh);
  const bool converged = bnmf_result_termination(raw) == BNMF_CONVERGED;
  std::printf("termination: %s\n", converged ? "converged" : "max_iters");
  std::printf("iterations: %d\n", bnmf_result_iterations(raw));
  std::printf("kappa: %.17g\n", bnmf_result_kappa(raw));
  std::printf("objective: %.17g\n", bnmf_result_objective(raw));
  std::printf("kkt_w: %.6e\n", kw);
  std::printf("kkt_h: %.6e\n", kh);
  std::printf("seconds: %.6f\n", bnmf_result_seconds(raw));
  return converged ? 0 : 2;
}

std::vector<bnmf_algorithm> ParseAlgos(const std::string& text) {
  std::vector<bnmf_algorithm> algos;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "bmm") {
      algos.push_back(BNMF_ALGO_BMM);
    } else if (item == "jmm") {
      algos.push_back(BNMF_ALGO_JMM);
    } else {
      throw CallFailed{"--algos accepts a comma list of bmm and jmm"};
    }
  }
  if (algos.empty()) throw CallFailed{"--algos must name at least one algorithm"};
  return algos;
}

void PrintSummary(const char* name, const bnmf_algorithm_stats& s) {
  std::printf(
      "%-4s runs=%zu time=%.6f s (std %.6f, 95%% CI [%.6f, %.6f]) "
      "iters=%.1f objective=%.10g kkt_w=%.3e kkt_h=%.3e\n",
      name, s.runs, s.seconds.mean, s.seconds.std, s.seconds.ci_low,
      s.seconds.ci_high, s.mean_iterations, s.mean_objective, s.mean_kkt_w,
      s.mean_kkt_h);
}

int RunBench(const DataFlags& d, const FitFlags& f, int seeds,
             const std::string& algos_text, const std::string& report,
             int jobs) {
  const std::vector<bnmf_algorithm> algos = ParseAlgos(algos_text);
  MatrixPtr data = LoadData(d);
  ConfigPtr config = MakeConfig(f, data.get());
  std::vector<uint64_t> seed_list;
  for (int i = 0; i < seeds; ++i) seed_list.push_back(f.seed + static_cast<uint64_t>(i));
  bnmf_bench* raw = nullptr;
  Check(bnmf_bench_run(data.get(), config.get(), seed_list.data(), seed_list.size(),
                       algos.data(), algos.size(), jobs, &raw));
  std::unique_ptr<bnmf_bench, BenchDeleter> bench(raw);
  if (!report.empty()) Check(bnmf_bench_write_json(raw, report.c_str()));
  for (bnmf_algorithm a : algos) {
    bnmf_algorithm_stats s{};
    if (bnmf_bench_stats(raw, a, &s) == BNMF_OK) {
      PrintSummary(a == BNMF_ALGO_BMM ? "bmm" : "jmm", s);
    }
  }
  double accel = 0.0;
  if (bnmf_bench_acceleration(raw, &accel)) {
    std::printf("acceleration: %.2f%%\n", accel);
    double worst = 0.0;
    for (size_t i = 0; i < bnmf_bench_agreement_count(raw); ++i) {
      worst = std::max(worst, bnmf_bench_agreement_mismatch(raw, i));
    }
    std::printf("max agreement mismatch: %.3e\n", worst);
  }
  return 0;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CallFailed{"--beta-grid expects a comma list of numbers"};
    }
  }
  return grid;
}

int RunVerify(const std::string& grid_text, int trials, uint64_t seed) {
  const std::vector<double> grid = ParseGrid(grid_text);
  bnmf_verify* raw = nullptr;
  Check(bnmf_verify_run(grid.empty() ? nullptr : grid.data(), grid.size(),
                        trials, seed, &raw));
  std::unique_ptr<bnmf_verify, VerifyDeleter> verify(raw);
  std::fputs(bnmf_verify_table(raw), stdout);
  if (bnmf_verify_passed(raw)) return 0;
  if (const char* ce = bnmf_verify_counterexample(raw)) {
    std::fprintf(stderr, "counterexample: %s\n", ce);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-divergence nonnegative matrix factorization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bnmf_version());

  DataFlags fit_data;
  FitFlags fit_flags;
  std::string out_dir;
  CLI::App* fit = app.add_subcommand("fit", "Run one factorization");
  AddDataFlags(fit, fit_data);
  AddFitFlags(fit, fit_flags);
  fit->add_option("--out", out_dir, "Output directory for W.csv, H.csv, trace.csv")
      ->required();

  DataFlags bench_data;
  FitFlags bench_flags;
  int seeds = 25;
  std::string algos = "bmm,jmm";
  std::string report;
  int jobs = 1;
  CLI::App* bench = app.add_subcommand("bench", "Compare algorithms over seeds");
  AddDataFlags(bench, bench_data);
  AddFitFlags(bench, bench_flags);
  bench->add_option("--seeds", seeds, "Number of initializations")
      ->check(CLI::PositiveNumber);
  bench->add_option("--algos", algos, "Comma list of algorithms");
  bench->add_option("--report", report, "JSON report path");
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string grid;
  int trials = 50;
  uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "Run the property suites");
  verify->add_option("--beta-grid", grid, "Comma list of beta values");
  verify->add_option("--trials", trials, "Random instances per suite and beta")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "Instance seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    CLI::App* help_for = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << help_for->help();
    return 1;
  }

  try {
    if (fit->parsed()) return RunFit(fit_data, fit_flags, out_dir);
    if (bench->parsed()) {
      return RunBench(bench_data, bench_flags, seeds, algos, report, jobs);
    }
    return RunVerify(grid, trials, verify_seed);
  } catch (const CallFailed& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return 1;
  }
}
