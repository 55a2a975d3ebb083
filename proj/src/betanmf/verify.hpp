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

#ifndef BETANMF_VERIFY_HPP_
#define BETANMF_VERIFY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace betanmf {

// Test hook: deliberately breaks one check so the failure path can be
// exercised.
enum class InjectedFault { kNone, kUnderestimateMajorizer };

struct VerifyOptions {
  std::vector<double> betas{-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  int trials = 50;  // random instances per suite and beta
  std::uint64_t seed = 1;
  InjectedFault fault = InjectedFault::kNone;
};

struct SuiteOutcome {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation seen, in the suite's own units
  // Offending instance of the first failure, enough to replay it.
  std::optional<nlohmann::json> counterexample;
};

struct VerifyReport {
  std::vector<SuiteOutcome> suites;
  bool passed() const;
  const SuiteOutcome* first_failure() const;
};

// Runs the majorization, tightness, split, descent, fast-path, coincidence
// and positivity suites on random instances.
VerifyReport run_verify(const VerifyOptions& options);

std::string format_table(const VerifyReport& report);

}  // namespace betanmf

#endif  // BETANMF_VERIFY_HPP_
