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

#ifndef BETANMF_MAJORIZER_HPP_
#define BETANMF_MAJORIZER_HPP_

#include "betanmf/core.hpp"

namespace betanmf {

// Frozen iterates around which the joint auxiliary function is built.
// v_tilde caches w_tilde * h_tilde + kappa.
struct MajorizerAnchor {
  Matrix w_tilde;
  Matrix h_tilde;
  Matrix v_tilde;
  double kappa = 0.0;
};

MajorizerAnchor make_anchor(const FactorPair& factors, double kappa);

// Splits d_beta(x | y), seen as a function of y, into a convex part, a
// concave part and a part that depends on x only.
struct DivergenceSplit {
  double convex = 0.0;
  double concave = 0.0;
  double constant = 0.0;
};

DivergenceSplit split_divergence(double x, double y, double beta);

// Derivative of the concave part with respect to y.
double concave_slope(double x, double y, double beta);

// Joint auxiliary function G(W, H | W~, H~). The convex part is bounded with
// Jensen weights lambda_fnk = w~_fk h~_kn / v~_fn; a positive kappa acts as
// one more frozen component with weight kappa / v~_fn. The concave part is
// replaced by its tangent at v~_fn.
double aux_value(const DataMatrix& v, const FactorPair& candidate,
                 const MajorizerAnchor& anchor, double beta);

struct AuxGradient {
  Matrix dw;
  Matrix dh;
};

// Central finite differences of aux_value; the step for each entry is
// relative_step * max(1, |entry|).
AuxGradient aux_partial_gradient_fd(const DataMatrix& v,
                                    const FactorPair& candidate,
                                    const MajorizerAnchor& anchor,
                                    double beta,
                                    double relative_step = 1e-6);

}  // namespace betanmf

#endif  // BETANMF_MAJORIZER_HPP_
