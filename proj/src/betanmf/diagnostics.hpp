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

#ifndef BETANMF_DIAGNOSTICS_HPP_
#define BETANMF_DIAGNOSTICS_HPP_

#include <cstdint>
#include <vector>

#include "betanmf/core.hpp"

namespace betanmf {

struct KktResiduals {
  double res_w = 0.0;
  double res_h = 0.0;
};

// res_w = || min(W, [(WH)^(beta-2) .* (WH - V)] H^T) ||_1 / (F K), and the
// mirror image for H divided by K N. Both WH and V carry the kappa shift.
KktResiduals kkt_residuals(const DataMatrix& v, const FactorPair& factors,
                           double beta);

// Same quantity from an already shifted data matrix and approx = WH + kappa.
KktResiduals kkt_residuals_from_approx(const Matrix& data, const Matrix& w,
                                       const Matrix& h, const Matrix& approx,
                                       double beta);

struct ColumnMatch {
  // permutation[i] is the column of the second matrix paired with column i
  // of the first.
  std::vector<int> permutation;
  // Largest relative l2 difference over the matched column pairs.
  double mismatch = 0.0;
};

// Optimal column pairing by total cosine similarity.
ColumnMatch match_columns(const Matrix& wa, const Matrix& wb);

// Minimum-cost perfect assignment on a square cost matrix. Exhaustive up to
// 8 x 8, Hungarian algorithm beyond.
std::vector<int> solve_assignment(const Matrix& cost);
std::vector<int> hungarian_assignment(const Matrix& cost);

// Operation-count difference (BMM minus JMM) per outer iteration, with
// L_W = L_H = L. Positive entries are savings brought by the joint updates.
struct SavingsReport {
  std::int64_t mult_diff = 0;
  std::int64_t div_diff = 0;
  std::int64_t add_diff = 0;
};

// Exact rows for beta in {0, 1, 2}; interval rows for (1, 2), > 2 and < 1.
// The < 1 division entry is -L K (FK + KN) - FN as tabulated, although the
// neighbouring rows suggest -L (FK + KN) - FN.
SavingsReport predicted_savings(std::int64_t f, std::int64_t n,
                                std::int64_t k, std::int64_t l, double beta);

}  // namespace betanmf

#endif  // BETANMF_DIAGNOSTICS_HPP_
