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

#include "betanmf/majorizer.hpp"

#include <algorithm>
#include <cmath>

namespace betanmf {

namespace {

double ConvexPart(double x, double y, double beta) {
  return split_divergence(x, y, beta).convex;
}

}  // namespace

MajorizerAnchor make_anchor(const FactorPair& factors, double kappa) {
  factors.validate();
  if (!std::isfinite(kappa) || kappa < 0.0) {
    Fail(ErrorCode::kDomain, "kappa must be finite and nonnegative");
  }
  MajorizerAnchor anchor;
  anchor.w_tilde = factors.w;
  anchor.h_tilde = factors.h;
  anchor.v_tilde = ((factors.w * factors.h).array() + kappa).matrix();
  anchor.kappa = kappa;
  return anchor;
}

DivergenceSplit split_divergence(double x, double y, double beta) {
  // Domain checks are shared with the scalar divergence.
  const double whole = beta_divergence_scalar(x, y, beta);
  if (beta >= 1.0 && beta <= 2.0) return {whole, 0.0, 0.0};
  if (beta == 0.0) return {x / y, std::log(y), -(std::log(x) + 1.0)};
  const double power_term = std::pow(y, beta) / beta;
  const double cross_term = -x * std::pow(y, beta - 1.0) / (beta - 1.0);
  const double constant = std::pow(x, beta) / (beta * (beta - 1.0));
  if (beta < 1.0) return {cross_term, power_term, constant};
  return {power_term, cross_term, constant};
}

double concave_slope(double x, double y, double beta) {
  if (beta >= 1.0 && beta <= 2.0) return 0.0;
  if (beta == 0.0) return 1.0 / y;
  if (beta < 1.0) return std::pow(y, beta - 1.0);
  return -x * std::pow(y, beta - 2.0);
}

double aux_value(const DataMatrix& v, const FactorPair& candidate,
                 const MajorizerAnchor& anchor, double beta) {
  candidate.validate_against(v);
  FactorPair{anchor.w_tilde, anchor.h_tilde}.validate_against(v);
  require_same_shape(anchor.v_tilde, v.values(), "aux_value anchor");
  if (candidate.rank() != anchor.w_tilde.cols()) {
    Fail(ErrorCode::kDimension, "aux_value: candidate and anchor ranks differ");
  }
  if (anchor.kappa != v.kappa()) {
    Fail(ErrorCode::kInvalidArgument, "anchor and data use different kappa");
  }
  const Matrix data = v.shifted();
  const Eigen::Index rank = candidate.rank();
  const double kappa = v.kappa();
  double total = 0.0;
  for (Eigen::Index f = 0; f < data.rows(); ++f) {
    for (Eigen::Index n = 0; n < data.cols(); ++n) {
      const double x = data(f, n);
      const double vt = anchor.v_tilde(f, n);
      double convex = 0.0;
      double approx = kappa;
      for (Eigen::Index k = 0; k < rank; ++k) {
        const double wh = candidate.w(f, k) * candidate.h(k, n);
        const double lambda =
            anchor.w_tilde(f, k) * anchor.h_tilde(k, n) / vt;
        convex += lambda * ConvexPart(x, wh / lambda, beta);
        approx += wh;
      }
      if (kappa > 0.0) convex += (kappa / vt) * ConvexPart(x, vt, beta);
      const DivergenceSplit at_anchor = split_divergence(x, vt, beta);
      const double concave =
          at_anchor.concave + concave_slope(x, vt, beta) * (approx - vt);
      total += convex + concave + at_anchor.constant;
    }
  }
  return total;
}

AuxGradient aux_partial_gradient_fd(const DataMatrix& v,
                                    const FactorPair& candidate,
                                    const MajorizerAnchor& anchor,
                                    double beta, double relative_step) {
  if (!(relative_step > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  }
  FactorPair probe = candidate;
  const auto differentiate = [&](Matrix& target) {
    Matrix grad(target.rows(), target.cols());
    for (Eigen::Index i = 0; i < target.rows(); ++i) {
      for (Eigen::Index j = 0; j < target.cols(); ++j) {
        const double x0 = target(i, j);
        const double step = relative_step * std::max(1.0, std::abs(x0));
        if (!(x0 > step)) {
          Fail(ErrorCode::kDomain,
               "finite-difference step leaves the positive orthant");
        }
        target(i, j) = x0 + step;
        const double up = aux_value(v, probe, anchor, beta);
        target(i, j) = x0 - step;
        const double down = aux_value(v, probe, anchor, beta);
        target(i, j) = x0;
        grad(i, j) = (up - down) / (2.0 * step);
      }
    }
    return grad;
  };
  AuxGradient out;
  out.dw = differentiate(probe.w);
  out.dh = differentiate(probe.h);
  return out;
}

}  // namespace betanmf
