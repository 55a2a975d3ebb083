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

#include "betanmf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "betanmf/updates.hpp"

namespace betanmf {

KktResiduals kkt_residuals(const DataMatrix& v, const FactorPair& factors,
                           double beta) {
  factors.validate_against(v);
  Matrix approx = factors.w * factors.h;
  approx.array() += v.kappa();
  return kkt_residuals_from_approx(v.shifted(), factors.w, factors.h, approx,
                                   beta);
}

KktResiduals kkt_residuals_from_approx(const Matrix& data, const Matrix& w,
                                       const Matrix& h, const Matrix& approx,
                                       double beta) {
  require_same_shape(data, approx, "kkt_residuals");
  if (w.rows() != data.rows() || h.cols() != data.cols() ||
      w.cols() != h.rows()) {
    Fail(ErrorCode::kDimension, "kkt_residuals: factor shapes do not match");
  }
  const Matrix grad_factor =
      (elementwise_power(approx, beta - 2.0).array() *
       (approx.array() - data.array()))
          .matrix();
  const Matrix grad_w = grad_factor * h.transpose();
  const Matrix grad_h = w.transpose() * grad_factor;
  KktResiduals out;
  out.res_w = w.array().min(grad_w.array()).abs().sum() /
              static_cast<double>(w.size());
  out.res_h = h.array().min(grad_h.array()).abs().sum() /
              static_cast<double>(h.size());
  return out;
}

namespace {

std::vector<int> ExhaustiveAssignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<int> hungarian_assignment(const Matrix& cost) {
  // Shortest augmenting path with row/column potentials, O(n^3).
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

std::vector<int> solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    Fail(ErrorCode::kDimension, "assignment needs a square cost matrix");
  }
  if (cost.rows() == 0) return {};
  if (cost.rows() <= 8) return ExhaustiveAssignment(cost);
  return hungarian_assignment(cost);
}

ColumnMatch match_columns(const Matrix& wa, const Matrix& wb) {
  require_same_shape(wa, wb, "match_columns");
  const Eigen::Index k = wa.cols();
  const Eigen::VectorXd norm_a = wa.colwise().norm().transpose();
  const Eigen::VectorXd norm_b = wb.colwise().norm().transpose();
  if ((norm_a.array() == 0.0).any() || (norm_b.array() == 0.0).any()) {
    Fail(ErrorCode::kDomain, "match_columns: zero column");
  }
  const Matrix similarity =
      (wa.transpose() * wb).array() /
      (norm_a * norm_b.transpose()).array();
  ColumnMatch out;
  out.permutation = solve_assignment(-similarity);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index j = out.permutation[static_cast<std::size_t>(i)];
    const double diff = (wa.col(i) - wb.col(j)).norm() / norm_a(i);
    out.mismatch = std::max(out.mismatch, diff);
  }
  return out;
}

SavingsReport predicted_savings(std::int64_t f, std::int64_t n,
                                std::int64_t k, std::int64_t l, double beta) {
  if (f < 1 || n < 1 || k < 1 || l < 1) {
    Fail(ErrorCode::kInvalidArgument,
         "predicted_savings needs positive F, N, K and L");
  }
  const std::int64_t fnk = f * n * k;
  const std::int64_t fn = f * n;
  const std::int64_t fk_kn = f * k + k * n;
  const std::int64_t common_add = (2 * l - 1) * fn * (k - 1);
  SavingsReport r;
  if (beta == 0.0) {
    r.mult_diff = (2 * l - 1) * fnk + 2 * l * fn;
    r.div_diff = 2 * (l - 1) * fn - l * fk_kn;
    r.add_diff = common_add;
  } else if (beta == 1.0) {
    r.mult_diff = (4 * l - 3) * fnk;
    r.div_diff = (2 * l - 1) * fn;
    r.add_diff = (4 * l - 3) * fnk - (l - 1) * (fn + fk_kn);
  } else if (beta == 2.0) {
    r.mult_diff = (2 * l - 1) * fnk;
    r.div_diff = -l * fk_kn;
    r.add_diff = common_add;
  } else if (beta > 1.0 && beta < 2.0) {
    r.mult_diff = (2 * l - 1) * fnk - l * fk_kn;
    r.div_diff = -l * (2 * fn - fk_kn);
    r.add_diff = common_add;
  } else if (beta > 2.0) {
    r.mult_diff = (2 * l - 1) * (fnk + fn);
    r.div_diff = -l * fk_kn;
    r.add_diff = common_add;
  } else {
    r.mult_diff = (2 * l - 1) * fnk;
    r.div_diff = -l * k * fk_kn - fn;
    r.add_diff = common_add;
  }
  return r;
}

}  // namespace betanmf
