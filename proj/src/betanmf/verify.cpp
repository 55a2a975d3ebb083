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

#include "betanmf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "betanmf/core.hpp"
#include "betanmf/majorizer.hpp"
#include "betanmf/solver.hpp"
#include "betanmf/updates.hpp"

namespace betanmf {

namespace {

nlohmann::json ToJson(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

double MaxRelativeError(const Matrix& got, const Matrix& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    const double w = want.data()[i];
    const double err = std::abs(got.data()[i] - w) /
                       std::max(std::abs(w), 1e-300);
    worst = std::max(worst, err);
  }
  return worst;
}

class Instances {
 public:
  explicit Instances(std::uint64_t seed) : rng_(seed) {}

  // 0.1 + |z|, away from zero so tolerances stay meaningful.
  Matrix positive(Eigen::Index rows, Eigen::Index cols) {
    Matrix m = half_normal_matrix(rows, cols, rng_());
    m.array() += 0.1;
    return m;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 rng_;
};

class Suite {
 public:
  explicit Suite(std::string name) { outcome_.name = std::move(name); }

  // violation <= 0 passes; the payload builder runs on first failure only.
  void check(double violation, double magnitude,
             const std::function<nlohmann::json()>& payload) {
    ++outcome_.checks;
    outcome_.worst = std::max(outcome_.worst, magnitude);
    if (violation > 0.0 || !std::isfinite(violation)) {
      ++outcome_.failures;
      if (!outcome_.counterexample) {
        nlohmann::json j = payload();
        j["suite"] = outcome_.name;
        outcome_.counterexample = std::move(j);
      }
    }
  }

  SuiteOutcome take() { return std::move(outcome_); }

 private:
  SuiteOutcome outcome_;
};

nlohmann::json Instance(double beta, double kappa, const Matrix& v,
                        const Matrix& w_tilde, const Matrix& h_tilde) {
  return {{"beta", beta},
          {"kappa", kappa},
          {"V", ToJson(v)},
          {"W_tilde", ToJson(w_tilde)},
          {"H_tilde", ToJson(h_tilde)}};
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteOutcome& s) { return s.failures == 0; });
}

const SuiteOutcome* VerifyReport::first_failure() const {
  for (const auto& s : suites) {
    if (s.failures > 0) return &s;
  }
  return nullptr;
}

VerifyReport run_verify(const VerifyOptions& options) {
  if (options.trials < 1) {
    Fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  }
  if (options.betas.empty()) {
    Fail(ErrorCode::kInvalidArgument, "beta grid is empty");
  }
  Instances gen(options.seed);
  Suite split("split_reconstruction");
  Suite major("majorization");
  Suite tight("tightness");
  Suite aux_descent("aux_descent");
  Suite obj_descent("objective_descent");
  Suite fast("fast_path_equivalence");
  Suite coincide("w_coincidence");
  Suite positive("positivity");

  for (const double beta : options.betas) {
    for (int t = 0; t < options.trials; ++t) {
      // Convex, concave and constant parts add up to the divergence.
      {
        const double x = gen.uniform(0.1, 3.0);
        const double y = gen.uniform(0.1, 3.0);
        const DivergenceSplit parts = split_divergence(x, y, beta);
        const double d = beta_divergence_scalar(x, y, beta);
        const double scale = std::max({std::abs(d), std::abs(parts.convex),
                                       std::abs(parts.concave),
                                       std::abs(parts.constant), 1e-300});
        const double err =
            std::abs(parts.convex + parts.concave + parts.constant - d) / scale;
        split.check(err - 1e-12, err, [&] {
          return nlohmann::json{{"beta", beta}, {"x", x}, {"y", y}};
        });
      }

      const double kappa = (t % 2 == 1) ? 0.1 : 0.0;

      // Majorization and tightness on 5 x 4, K = 3.
      {
        const DataMatrix v(gen.positive(5, 4), kappa);
        const FactorPair anchor_pair{gen.positive(5, 3), gen.positive(3, 4)};
        const FactorPair candidate{gen.positive(5, 3), gen.positive(3, 4)};
        const MajorizerAnchor anchor = make_anchor(anchor_pair, kappa);
        double g = aux_value(v, candidate, anchor, beta);
        if (options.fault == InjectedFault::kUnderestimateMajorizer) {
          g -= 1.0 + std::abs(g);
        }
        const double d = objective(v, candidate, beta);
        const double slack = 1e-9 * (1.0 + std::abs(d));
        major.check(d - g - slack, std::max(0.0, d - g), [&] {
          nlohmann::json j = Instance(beta, kappa, v.values(), anchor.w_tilde,
                                      anchor.h_tilde);
          j["W"] = ToJson(candidate.w);
          j["H"] = ToJson(candidate.h);
          j["aux_value"] = g;
          j["objective"] = d;
          return j;
        });

        const double g0 = aux_value(v, anchor_pair, anchor, beta);
        const double d0 = objective(v, anchor_pair, beta);
        const double rel = std::abs(g0 - d0) / std::max(std::abs(d0), 1e-300);
        tight.check(rel - 1e-9, rel, [&] {
          nlohmann::json j = Instance(beta, kappa, v.values(), anchor.w_tilde,
                                      anchor.h_tilde);
          j["aux_value"] = g0;
          j["objective"] = d0;
          return j;
        });
      }

      // Descent, coincidence, positivity and fast paths on 8 x 6, K = 3.
      {
        const DataMatrix v(gen.positive(8, 6), kappa);
        const FactorPair start{gen.positive(8, 3), gen.positive(3, 6)};
        const MajorizerAnchor anchor = make_anchor(start, kappa);
        const Matrix data = v.shifted();
        UpdateOptions opts;
        opts.kappa = kappa;

        const Matrix w1 = jmm_update_w(data, anchor, anchor.h_tilde, beta, opts);
        const Matrix h1 = jmm_update_h(data, anchor, w1, beta, opts);
        const double g_before = aux_value(v, start, anchor, beta);
        const double g_after = aux_value(v, FactorPair{w1, h1}, anchor, beta);
        aux_descent.check(g_after - g_before - 1e-9 * (1.0 + std::abs(g_before)),
                          std::max(0.0, g_after - g_before), [&] {
                            nlohmann::json j = Instance(
                                beta, kappa, data, anchor.w_tilde, anchor.h_tilde);
                            j["aux_before"] = g_before;
                            j["aux_after"] = g_after;
                            return j;
                          });

        for (const Algorithm algo : {Algorithm::kBmm, Algorithm::kJmm}) {
          SolverConfig config;
          config.beta = beta;
          config.rank = 3;
          config.algorithm = algo;
          config.kappa = kappa;
          config.max_outer_iters = 1;
          config.check_convergence = false;
          config.trace_kkt = false;
          const FitResult r = fit(v, config, start);
          const double before = r.initial_objective;
          const double after = r.trace.front().objective;
          obj_descent.check(after - before - 1e-10 * std::abs(before),
                            std::max(0.0, (after - before) / before), [&] {
                              nlohmann::json j = Instance(beta, kappa, data,
                                                          start.w, start.h);
                              j["algorithm"] = algorithm_name(algo);
                              j["before"] = before;
                              j["after"] = after;
                              return j;
                            });
        }

        const Matrix wb = bmm_update_w(data, start.w, start.h, beta, opts);
        const double rel_w = MaxRelativeError(w1, wb);
        coincide.check(rel_w - 1e-14, rel_w, [&] {
          return Instance(beta, kappa, data, start.w, start.h);
        });

        const Matrix hb = bmm_update_h(data, start.w, start.h, beta, opts);
        const Matrix h_moving = gen.positive(3, 6);
        const Matrix w_moving = gen.positive(8, 3);
        const Matrix wj = jmm_update_w(data, anchor, h_moving, beta, opts);
        const Matrix hj = jmm_update_h(data, anchor, w_moving, beta, opts);
        bool all_positive = true;
        for (const Matrix* m : {&w1, &h1, &wb, &hb, &wj, &hj}) {
          all_positive = all_positive && m->allFinite() && (m->array() > 0.0).all();
        }
        positive.check(all_positive ? -1.0 : 1.0, all_positive ? 0.0 : 1.0, [&] {
          return Instance(beta, kappa, data, start.w, start.h);
        });

        if (has_fast_path(beta)) {
          const double errs[] = {
              MaxRelativeError(
                  fast_bmm_update_w(data, start.w, start.h, beta, opts), wb),
              MaxRelativeError(
                  fast_bmm_update_h(data, start.w, start.h, beta, opts), hb),
              MaxRelativeError(
                  fast_jmm_update_w(data, anchor, h_moving, beta, opts), wj),
              MaxRelativeError(
                  fast_jmm_update_h(data, anchor, w_moving, beta, opts), hj),
              MaxRelativeError(
                  fast_jmm_update_w(data, anchor, anchor.h_tilde, beta, opts),
                  w1),
          };
          const double worst = *std::max_element(std::begin(errs), std::end(errs));
          fast.check(worst - 1e-12, worst, [&] {
            nlohmann::json j = Instance(beta, kappa, data, start.w, start.h);
            j["H_moving"] = ToJson(h_moving);
            j["W_moving"] = ToJson(w_moving);
            return j;
          });
        }
      }
    }
  }

  VerifyReport report;
  for (Suite* s : {&split, &major, &tight, &aux_descent, &obj_descent, &fast,
                   &coincide, &positive}) {
    report.suites.push_back(s->take());
  }
  return report;
}

std::string format_table(const VerifyReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %12s  %s\n", "suite",
                "checks", "failures", "worst", "status");
  out << line;
  for (const auto& s : report.suites) {
    std::snprintf(line, sizeof(line), "%-24s %8d %8d %12.3e  %s\n",
                  s.name.c_str(), s.checks, s.failures, s.worst,
                  s.checks == 0 ? "SKIP" : (s.failures == 0 ? "PASS" : "FAIL"));
    out << line;
  }
  return out.str();
}

}  // namespace betanmf
