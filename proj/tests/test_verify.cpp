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

#include <algorithm>
#include <string>

#include "betanmf/majorizer.hpp"
#include "betanmf/verify.hpp"
#include "test_util.hpp"

using namespace betanmf;
using testutil::CodeOf;

namespace {

Matrix FromJson(const nlohmann::json& rows) {
  Matrix m(rows.size(), rows.at(0).size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows.at(i).at(j).get<double>();
  }
  return m;
}

}  // namespace

TEST_CASE("run_verify passes on the default grid") {
  const VerifyReport r = run_verify(VerifyOptions{});
  CHECK(r.passed());
  CHECK(r.first_failure() == nullptr);
  REQUIRE(r.suites.size() == 8);
  for (const auto& s : r.suites) {
    CAPTURE(s.name);
    CHECK(s.failures == 0);
    CHECK(s.checks > 0);
    CHECK_FALSE(s.counterexample.has_value());
  }
  // 7 betas x 50 trials, BMM and JMM for the descent suite.
  CHECK(r.suites[0].checks == 350);
  CHECK(r.suites[4].checks == 700);
  // Fast paths exist for three of the seven betas.
  CHECK(r.suites[5].checks == 150);
}

TEST_CASE("run_verify detects an underestimating majorizer") {
  VerifyOptions opts;
  opts.trials = 3;
  opts.fault = InjectedFault::kUnderestimateMajorizer;
  const VerifyReport r = run_verify(opts);
  CHECK_FALSE(r.passed());
  const SuiteOutcome* f = r.first_failure();
  REQUIRE(f != nullptr);
  CHECK(f->name == "majorization");
  CHECK(f->failures == f->checks);
  REQUIRE(f->counterexample.has_value());
  const nlohmann::json& c = *f->counterexample;
  CHECK(c["suite"] == "majorization");

  // Replaying the instance with the real majorizer shows the fault was injected.
  const double beta = c["beta"].get<double>();
  const double kappa = c["kappa"].get<double>();
  const DataMatrix v(FromJson(c["V"]), kappa);
  const FactorPair anchor{FromJson(c["W_tilde"]), FromJson(c["H_tilde"])};
  const FactorPair candidate{FromJson(c["W"]), FromJson(c["H"])};
  const double d = objective(v, candidate, beta);
  CHECK(d == doctest::Approx(c["objective"].get<double>()).epsilon(1e-12));
  const double g = aux_value(v, candidate, make_anchor(anchor, kappa), beta);
  CHECK(g >= d * (1.0 - 1e-12));
  CHECK(c["aux_value"].get<double>() < d);
}

TEST_CASE("run_verify options") {
  VerifyOptions opts;
  opts.betas = {1.0};
  opts.trials = 2;
  const VerifyReport r = run_verify(opts);
  CHECK(r.passed());
  CHECK(r.suites[0].checks == 2);

  opts.betas = {0.5};
  const VerifyReport no_fast = run_verify(opts);
  CHECK(no_fast.suites[5].checks == 0);
  CHECK(format_table(no_fast).find("SKIP") != std::string::npos);

  opts.trials = 0;
  CHECK(CodeOf([&] { run_verify(opts); }) == ErrorCode::kInvalidArgument);
  opts.trials = 1;
  opts.betas.clear();
  CHECK(CodeOf([&] { run_verify(opts); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("format_table") {
  VerifyOptions opts;
  opts.trials = 2;
  const std::string ok = format_table(run_verify(opts));
  CHECK(ok.rfind("suite", 0) == 0);
  CHECK(ok.find("majorization") != std::string::npos);
  CHECK(ok.find("w_coincidence") != std::string::npos);
  CHECK(ok.find("FAIL") == std::string::npos);
  CHECK(std::count(ok.begin(), ok.end(), '\n') == 9);

  opts.fault = InjectedFault::kUnderestimateMajorizer;
  const std::string bad = format_table(run_verify(opts));
  CHECK(bad.find("FAIL") != std::string::npos);
}
