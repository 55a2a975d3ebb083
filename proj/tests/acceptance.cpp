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

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "betanmf/bench.hpp"
#include "betanmf/diagnostics.hpp"
#include "betanmf/majorizer.hpp"
#include "betanmf/solver.hpp"
#include "betanmf/updates.hpp"
#include "oracle_values.hpp"

using namespace betanmf;

namespace {

constexpr double kBetas[] = {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
constexpr double kSpecialBetas[] = {0.0, 1.0, 2.0};

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Instances {
 public:
  explicit Instances(std::uint64_t seed) : rng_(seed) {}
  Matrix positive(Eigen::Index rows, Eigen::Index cols) {
    Matrix m = half_normal_matrix(rows, cols, rng_());
    m.array() += 0.1;
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

double MaxRel(const Matrix& got, const Matrix& want) {
  return ((got - want).array().abs() / want.array().abs()).maxCoeff();
}

std::string Fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

DataMatrix Synthetic(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank,
                     std::uint64_t seed) {
  SyntheticSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.rank = rank;
  spec.seed = seed;
  return make_synthetic(spec);
}

Verdict Descent() {
  Verdict v;
  double worst = 0.0;
  int fits = 0;
  for (double beta : kBetas) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const DataMatrix data = Synthetic(60, 50, 5, 100 + seed);
      for (Algorithm algo : {Algorithm::kBmm, Algorithm::kJmm}) {
        SolverConfig c;
        c.beta = beta;
        c.rank = 5;
        c.algorithm = algo;
        c.seed = seed;
        c.max_outer_iters = 300;
        c.check_convergence = false;
        c.trace_kkt = false;
        const FitResult r = fit(data, c);
        ++fits;
        if (r.iterations != 300) v.pass = false;
        double prev = r.initial_objective;
        for (const TraceRow& row : r.trace) {
          const double rise = (row.objective - prev) / prev;
          worst = std::max(worst, rise);
          if (rise > 1e-10) v.pass = false;
          prev = row.objective;
        }
      }
    }
  }
  v.detail = std::to_string(fits) + " fits x 300 iterations, largest relative rise " +
             Fmt("%.2e", worst);
  return v;
}

Verdict Majorization() {
  Verdict v;
  Instances gen(2);
  double worst_gap = 0.0;
  double worst_tight = 0.0;
  for (double beta : kBetas) {
    for (int t = 0; t < 200; ++t) {
      const double kappa = t % 2 == 1 ? 0.1 : 0.0;
      const DataMatrix data(gen.positive(5, 4), kappa);
      const FactorPair anchor_pair{gen.positive(5, 3), gen.positive(3, 4)};
      const FactorPair candidate{gen.positive(5, 3), gen.positive(3, 4)};
      const MajorizerAnchor anchor = make_anchor(anchor_pair, kappa);
      const double g = aux_value(data, candidate, anchor, beta);
      const double d = objective(data, candidate, beta);
      worst_gap = std::max(worst_gap, d - g);
      if (g < d - 1e-9) v.pass = false;
      const double g0 = aux_value(data, anchor_pair, anchor, beta);
      const double d0 = objective(data, anchor_pair, beta);
      const double rel = std::abs(g0 - d0) / d0;
      worst_tight = std::max(worst_tight, rel);
      if (rel > 1e-9) v.pass = false;
    }
  }
  v.detail = "7 betas x 200 tuples, max(D - G) " + Fmt("%.2e", worst_gap) +
             ", max tightness error " + Fmt("%.2e", worst_tight);
  return v;
}

Verdict FastPaths() {
  Verdict v;
  Instances gen(3);
  double worst = 0.0;
  for (double beta : kSpecialBetas) {
    for (int t = 0; t < 100; ++t) {
      UpdateOptions opts;
      opts.kappa = t % 2 == 1 ? 0.1 : 0.0;
      Matrix data = gen.positive(8, 6);
      data.array() += opts.kappa;
      const FactorPair cur{gen.positive(8, 3), gen.positive(3, 6)};
      const MajorizerAnchor anchor = make_anchor(cur, opts.kappa);
      const Matrix h_moving = gen.positive(3, 6);
      const Matrix w_moving = gen.positive(8, 3);
      const double errs[] = {
          MaxRel(fast_bmm_update_w(data, cur.w, cur.h, beta, opts),
                 bmm_update_w(data, cur.w, cur.h, beta, opts)),
          MaxRel(fast_bmm_update_h(data, cur.w, cur.h, beta, opts),
                 bmm_update_h(data, cur.w, cur.h, beta, opts)),
          MaxRel(fast_jmm_update_w(data, anchor, h_moving, beta, opts),
                 jmm_update_w(data, anchor, h_moving, beta, opts)),
          MaxRel(fast_jmm_update_h(data, anchor, w_moving, beta, opts),
                 jmm_update_h(data, anchor, w_moving, beta, opts)),
      };
      for (double e : errs) {
        worst = std::max(worst, e);
        if (!(e <= 1e-12)) v.pass = false;
      }
    }
  }
  v.detail = "3 betas x 100 instances x {BMM, JMM} x {W, H}, max relative error " +
             Fmt("%.2e", worst);
  return v;
}

Verdict Coincidence() {
  Verdict v;
  Instances gen(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double beta = kBetas[t % 7];
    UpdateOptions opts;
    opts.kappa = t % 2 == 1 ? 0.1 : 0.0;
    Matrix data = gen.positive(8, 6);
    data.array() += opts.kappa;
    const FactorPair cur{gen.positive(8, 3), gen.positive(3, 6)};
    const MajorizerAnchor anchor = make_anchor(cur, opts.kappa);
    const double e = MaxRel(jmm_update_w(data, anchor, cur.h, beta, opts),
                            bmm_update_w(data, cur.w, cur.h, beta, opts));
    worst = std::max(worst, e);
    if (!(e <= 1e-14)) v.pass = false;
  }
  v.detail = "100 instances over the beta grid, max relative difference " +
             Fmt("%.2e", worst);
  return v;
}

Verdict GradientCancellation() {
  Verdict v;
  Instances gen(5);
  double worst = 0.0;
  for (double beta : {1.0, 1.5, 2.0}) {
    for (int t = 0; t < 20; ++t) {
      const double kappa = t % 2 == 1 ? 0.1 : 0.0;
      const DataMatrix data(gen.positive(6, 5), kappa);
      const MajorizerAnchor anchor =
          make_anchor({gen.positive(6, 3), gen.positive(3, 5)}, kappa);
      const Matrix h = gen.positive(3, 5);
      UpdateOptions opts;
      opts.kappa = kappa;
      const Matrix w_new = jmm_update_w(data.shifted(), anchor, h, beta, opts);
      const double scale = std::max(
          1.0, aux_partial_gradient_fd(data, {anchor.w_tilde, h}, anchor, beta)
                   .dw.cwiseAbs()
                   .maxCoeff());
      const double g =
          aux_partial_gradient_fd(data, {w_new, h}, anchor, beta).dw.cwiseAbs().maxCoeff();
      worst = std::max(worst, g / scale);
      if (!(g <= 1e-4 * scale)) v.pass = false;
    }
  }
  v.detail = "beta in {1, 1.5, 2} x 20 instances, max |dG/dW| / scale " + Fmt("%.2e", worst);
  return v;
}

// Criteria 6 and 7 share these runs.
struct KktRuns {
  std::vector<double> betas;
  std::vector<BenchReport> reports;
};

KktRuns RunKktFits() {
  KktRuns out;
  const DataMatrix data = Synthetic(100, 80, 5, 2024);
  for (double beta : kSpecialBetas) {
    SolverConfig c;
    c.beta = beta;
    c.rank = 5;
    c.tol = 1e-5;
    // High enough that every run stops on the tolerance rule.
    c.max_outer_iters = 100000;
    c.trace_kkt = false;
    BenchOptions opts;
    opts.seeds = {0, 1, 2, 3, 4};
    out.betas.push_back(beta);
    out.reports.push_back(run_bench(data, c, opts));
  }
  return out;
}

Verdict Kkt(const KktRuns& runs) {
  Verdict v;
  std::string detail;
  for (std::size_t b = 0; b < runs.betas.size(); ++b) {
    double worst = 0.0;
    double worst_fn = 0.0;
    int converged = 0;
    int total = 0;
    for (const auto& a : runs.reports[b].algorithms) {
      for (const auto& r : a.runs) {
        const double m = std::max(r.kkt.res_w, r.kkt.res_h);
        worst = std::max(worst, m);
        // Same sums divided by F N instead of F K and K N, for reference.
        const double fn = 100.0 * 80.0;
        worst_fn = std::max({worst_fn, r.kkt.res_w * 100.0 * 5.0 / fn,
                             r.kkt.res_h * 5.0 * 80.0 / fn});
        if (r.termination == Termination::kConverged) ++converged;
        ++total;
        if (!(m <= 0.1) || r.termination != Termination::kConverged) v.pass = false;
      }
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%sbeta=%g max %.3g (F N scaled %.3g, %d/%d converged)",
                  b == 0 ? "" : "; ", runs.betas[b], worst, worst_fn, converged, total);
    detail += buf;
  }
  v.detail = detail;
  return v;
}

Verdict Agreement(const KktRuns& runs) {
  Verdict v;
  std::string detail;
  for (std::size_t b = 0; b < runs.betas.size(); ++b) {
    int agree = 0;
    std::string list;
    for (const auto& g : runs.reports[b].agreement) {
      if (g.mismatch <= 1e-2) ++agree;
      list += (list.empty() ? "" : ",") + Fmt("%.1e", g.mismatch);
    }
    if (agree < 4) v.pass = false;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%sbeta=%g %d/5 [%s]", b == 0 ? "" : "; ",
                  runs.betas[b], agree, list.c_str());
    detail += buf;
  }
  v.detail = detail;
  return v;
}

Verdict CostModel() {
  Verdict v;
  int rows = 0;
  for (const auto& c : oracle::kSavings) {
    const SavingsReport s = predicted_savings(c.f, c.n, c.k, c.l, c.beta);
    if (s.mult_diff != c.mult || s.div_diff != c.div || s.add_diff != c.add) v.pass = false;
    ++rows;
  }
  const SavingsReport kl = predicted_savings(2, 3, 4, 1, 1.0);
  if (kl.mult_diff != 24 || kl.div_diff != 6 || kl.add_diff != 24) v.pass = false;
  int shapes = 0;
  for (std::int64_t f = 1; f <= 64; f *= 2) {
    for (std::int64_t n = 1; n <= 64; n *= 2) {
      for (std::int64_t k = 2; k <= 32; ++k) {
        for (double beta : kSpecialBetas) {
          const SavingsReport s = predicted_savings(f, n, k, 1, beta);
          if (!(s.mult_diff > 0 && s.add_diff > 0)) v.pass = false;
          ++shapes;
        }
      }
    }
  }
  v.detail = std::to_string(rows) + " reference rows, (2,3,4,1,1) -> " +
             std::to_string(kl.mult_diff) + "/" + std::to_string(kl.div_diff) + "/" +
             std::to_string(kl.add_diff) + ", " + std::to_string(shapes) +
             " positive-savings shapes";
  return v;
}

Verdict Speed() {
  Verdict v;
  const DataMatrix data = Synthetic(1000, 800, 20, 9);
  std::string detail;
  for (double beta : {0.0, 1.0, 2.0, 1.5}) {
    SolverConfig c;
    c.beta = beta;
    c.rank = 20;
    c.max_outer_iters = 50;
    c.check_convergence = false;
    c.trace_kkt = false;
    BenchOptions opts;
    opts.seeds = {0, 1, 2};
    opts.jobs = 1;
    const BenchReport r = run_bench(data, c, opts);
    const double bmm = r.find(Algorithm::kBmm)->seconds_per_iteration.mean;
    const double jmm = r.find(Algorithm::kJmm)->seconds_per_iteration.mean;
    const bool asserted = beta != 1.5;
    if (asserted && !(jmm < bmm)) v.pass = false;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%sbeta=%g BMM %.1f ms JMM %.1f ms%s", detail.empty() ? "" : "; ",
                  beta, 1e3 * bmm, 1e3 * jmm, asserted ? "" : " (not asserted)");
    detail += buf;
  }
  v.detail = detail + " per iteration";
  return v;
}

Verdict SubIterations() {
  Verdict v;
  const DataMatrix data = Synthetic(200, 150, 10, 31);
  double worst = 0.0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    double finals[2];
    int i = 0;
    for (int l : {1, 10}) {
      SolverConfig c;
      c.beta = 1.0;
      c.rank = 10;
      c.sub_iters = l;
      c.seed = seed;
      c.max_outer_iters = 200;
      c.check_convergence = false;
      c.trace_kkt = false;
      finals[i++] = fit(data, c).objective;
    }
    const double rel = std::abs(finals[0] - finals[1]) / finals[0];
    worst = std::max(worst, rel);
    if (!(rel <= 1e-3)) v.pass = false;
  }
  v.detail = "3 seeds x 200 outer iterations, max relative gap " + Fmt("%.2e", worst);
  return v;
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const char* name, const std::function<Verdict()>& run) {
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %-26s %s  %s  [%.1f s]\n", id, name, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  };
  report(1, "descent", Descent);
  report(2, "majorization tightness", Majorization);
  report(3, "fast-path equivalence", FastPaths);
  report(4, "W-update coincidence", Coincidence);
  report(5, "gradient cancellation", GradientCancellation);
  KktRuns runs;
  report(6, "KKT convergence", [&] {
    runs = RunKktFits();
    return Kkt(runs);
  });
  report(7, "solution agreement", [&] { return Agreement(runs); });
  report(8, "cost model", CostModel);
  report(9, "directional speed", Speed);
  report(10, "sub-iteration insensitivity", SubIterations);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
