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

#ifndef BETANMF_UPDATES_HPP_
#define BETANMF_UPDATES_HPP_

#include "betanmf/core.hpp"
#include "betanmf/majorizer.hpp"

namespace betanmf {

enum class Algorithm { kBmm, kJmm };

const char* algorithm_name(Algorithm algorithm);

struct UpdateKind {
  Algorithm algorithm = Algorithm::kJmm;
  bool use_fast_path = true;  // only takes effect for beta in {0, 1, 2}
  // Replaces gamma(beta) by 1. Off by default: with the joint scheme this
  // is known to settle on worse solutions, and no descent guarantee holds.
  bool heuristic_gamma_one = false;
};

struct UpdateOptions {
  double kappa = 0.0;
  double floor = kDefaultDenominatorFloor;
  bool heuristic_gamma_one = false;
};

bool has_fast_path(double beta);

// Entrywise m^p; p == 0 and p == 1 never call pow.
Matrix elementwise_power(const Matrix& m, double p);

// chi1 = m~^(2-beta) / m^(1-beta) for beta <= 2, m otherwise.
Matrix chi1(const Matrix& m, const Matrix& m_tilde, double beta);
// chi2 = m for beta < 1, m^beta / m~^(beta-1) otherwise.
Matrix chi2(const Matrix& m, const Matrix& m_tilde, double beta);

// Block MM updates. `data` is V + kappa. `approx`, when given, must hold
// w * h + kappa and saves recomputing the product.
Matrix bmm_update_w(const Matrix& data, const Matrix& w, const Matrix& h,
                    double beta, const UpdateOptions& options = {},
                    const Matrix* approx = nullptr);
Matrix bmm_update_h(const Matrix& data, const Matrix& w, const Matrix& h,
                    double beta, const UpdateOptions& options = {},
                    const Matrix* approx = nullptr);

// Quantities of the joint updates that only depend on the anchor, computed
// once per outer iteration and shared by every sub-iteration.
struct JmmTerms {
  double beta = 0.0;
  bool fast = false;
  // General form: (V + kappa) .* V~^(beta-2) and V~^(beta-1).
  // beta = 0 fast form: (V + kappa) ./ V~^2 and 1 ./ V~.
  // beta = 1 fast form: ratio = (V + kappa) ./ V~, power unused.
  // beta = 2 fast form: both unused; kernels read V + kappa and V~.
  Matrix ratio;
  Matrix power;
  // beta = 1 fast form only: ratio * H~^T and W~^T * ratio.
  Matrix ratio_ht;
  Matrix wt_ratio;
};

JmmTerms make_jmm_terms(const Matrix& data, const MajorizerAnchor& anchor,
                        double beta, bool fast,
                        double floor = kDefaultDenominatorFloor);

// Joint MM updates around a fixed anchor. When the moving factor equals the
// anchor bitwise, chi1 and chi2 reduce to it and are not evaluated.
Matrix jmm_update_w(const Matrix& data, const MajorizerAnchor& anchor,
                    const Matrix& h_current, double beta,
                    const UpdateOptions& options = {},
                    const JmmTerms* terms = nullptr);
Matrix jmm_update_h(const Matrix& data, const MajorizerAnchor& anchor,
                    const Matrix& w_current, double beta,
                    const UpdateOptions& options = {},
                    const JmmTerms* terms = nullptr);

// Simplified updates for beta in {0, 1, 2}; same results as the general
// kernels without degenerate powers. Throw kInvalidArgument otherwise.
Matrix fast_bmm_update_w(const Matrix& data, const Matrix& w, const Matrix& h,
                         double beta, const UpdateOptions& options = {},
                         const Matrix* approx = nullptr);
Matrix fast_bmm_update_h(const Matrix& data, const Matrix& w, const Matrix& h,
                         double beta, const UpdateOptions& options = {},
                         const Matrix* approx = nullptr);
Matrix fast_jmm_update_w(const Matrix& data, const MajorizerAnchor& anchor,
                         const Matrix& h_current, double beta,
                         const UpdateOptions& options = {},
                         const JmmTerms* terms = nullptr);
Matrix fast_jmm_update_h(const Matrix& data, const MajorizerAnchor& anchor,
                         const Matrix& w_current, double beta,
                         const UpdateOptions& options = {},
                         const JmmTerms* terms = nullptr);

enum class Target { kW, kH };

// Dispatches to the simplified kernel for `target`. For BMM, `current` holds
// (W, H); for JMM, `anchor` is required and `moving` is the non-anchored
// factor (H when updating W, W when updating H).
Matrix fast_path_update(Target target, const UpdateKind& kind,
                        const Matrix& data, const FactorPair* current,
                        const MajorizerAnchor* anchor, const Matrix* moving,
                        double beta, const UpdateOptions& options = {});

}  // namespace betanmf

#endif  // BETANMF_UPDATES_HPP_
