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

#ifndef BETANMF_CORE_HPP_
#define BETANMF_CORE_HPP_

#include <cstddef>

#include <Eigen/Core>

#include "betanmf/error.hpp"

namespace betanmf {

// Dense storage, row-major so that a matrix maps onto a flat C array.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Denominators are clamped to this value before any entrywise division.
inline constexpr double kDefaultDenominatorFloor = 1e-300;

// Nonnegative observations plus the shift kappa applied as V + kappa * ones.
class DataMatrix {
 public:
  DataMatrix() = default;
  // Throws kInvalidArgument for empty input, kDomain for negative or
  // non-finite entries or a negative kappa.
  explicit DataMatrix(Matrix values, double kappa = 0.0);

  const Matrix& values() const { return values_; }
  double kappa() const { return kappa_; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  bool has_zeros() const { return has_zeros_; }

  // values + kappa, the matrix every kernel actually consumes.
  Matrix shifted() const;
  DataMatrix with_kappa(double kappa) const;

  // Raises kDomain when beta < 1 would be used on data containing zeros
  // without a positive shift.
  void check_usable_with(double beta) const;

 private:
  Matrix values_;
  double kappa_ = 0.0;
  bool has_zeros_ = false;
};

struct FactorPair {
  Matrix w;  // F x K
  Matrix h;  // K x N

  Eigen::Index rank() const { return w.cols(); }

  // Dimension consistency and strict positivity; throws on violation.
  void validate() const;
  void validate_against(const DataMatrix& v) const;
};

// Exponent applied to multiplicative update ratios; lies in (0, 1].
double gamma_exponent(double beta);

// d_beta(x | y). Throws kDomain when y <= 0, x < 0, or x == 0 with beta <= 0.
double beta_divergence_scalar(double x, double y, double beta);

// Sum of d_beta(x_ij | y_ij) over all entries; no domain checks on the hot
// path beyond a final finiteness test.
double divergence_sum(const Matrix& x, const Matrix& y, double beta);

// D_beta(V + kappa | WH + kappa).
double objective(const DataMatrix& v, const FactorPair& factors, double beta);

// numerator / max(denominator, floor), entrywise.
Matrix guarded_divide(const Matrix& numerator, const Matrix& denominator,
                      double floor = kDefaultDenominatorFloor);

// 0 when beta is in [1, 2] and the data has no zeros, 1e-9 * mean(V)
// otherwise.
double default_kappa(const Matrix& values, double beta);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace betanmf

#endif  // BETANMF_CORE_HPP_
