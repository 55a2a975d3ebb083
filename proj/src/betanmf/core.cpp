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

#include "betanmf/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace betanmf {

namespace {

std::string Shape(const Matrix& m) {
  std::ostringstream out;
  out << m.rows() << "x" << m.cols();
  return out.str();
}

}  // namespace

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    Fail(ErrorCode::kDimension, std::string(what) + ": shape mismatch " +
                                    Shape(a) + " vs " + Shape(b));
  }
}

DataMatrix::DataMatrix(Matrix values, double kappa)
    : values_(std::move(values)), kappa_(kappa) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    Fail(ErrorCode::kInvalidArgument, "data matrix must be at least 1x1");
  }
  if (!std::isfinite(kappa_) || kappa_ < 0.0) {
    Fail(ErrorCode::kDomain, "kappa must be finite and nonnegative");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double x = values_(i, j);
      if (!std::isfinite(x) || x < 0.0) {
        std::ostringstream msg;
        msg << "data entry (" << i << ", " << j << ") = " << x
            << " is not a finite nonnegative value";
        Fail(ErrorCode::kDomain, msg.str());
      }
      if (x == 0.0) has_zeros_ = true;
    }
  }
}

Matrix DataMatrix::shifted() const {
  if (kappa_ == 0.0) return values_;
  return (values_.array() + kappa_).matrix();
}

DataMatrix DataMatrix::with_kappa(double kappa) const {
  DataMatrix out = *this;
  if (!std::isfinite(kappa) || kappa < 0.0) {
    Fail(ErrorCode::kDomain, "kappa must be finite and nonnegative");
  }
  out.kappa_ = kappa;
  return out;
}

void DataMatrix::check_usable_with(double beta) const {
  if (beta < 1.0 && has_zeros_ && kappa_ <= 0.0) {
    Fail(ErrorCode::kDomain,
         "data contains zeros and beta < 1: the divergence is undefined, "
         "set a positive kappa shift");
  }
}

void FactorPair::validate() const {
  if (w.cols() < 1 || w.rows() < 1 || h.cols() < 1) {
    Fail(ErrorCode::kDimension, "factors must be non-empty");
  }
  if (w.cols() != h.rows()) {
    Fail(ErrorCode::kDimension, "W has " + std::to_string(w.cols()) +
                                    " columns but H has " +
                                    std::to_string(h.rows()) + " rows");
  }
  const auto positive = [](const Matrix& m) {
    return (m.array() > 0.0).all() && m.allFinite();
  };
  if (!positive(w) || !positive(h)) {
    Fail(ErrorCode::kDomain, "factor entries must be finite and > 0");
  }
}

void FactorPair::validate_against(const DataMatrix& v) const {
  validate();
  if (w.rows() != v.rows() || h.cols() != v.cols()) {
    Fail(ErrorCode::kDimension, "factor product " + std::to_string(w.rows()) +
                                    "x" + std::to_string(h.cols()) +
                                    " does not match data " +
                                    Shape(v.values()));
  }
}

double gamma_exponent(double beta) {
  if (beta < 1.0) return 1.0 / (2.0 - beta);
  if (beta <= 2.0) return 1.0;
  return 1.0 / (beta - 1.0);
}

double beta_divergence_scalar(double x, double y, double beta) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    Fail(ErrorCode::kDomain, "beta-divergence needs y > 0");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    Fail(ErrorCode::kDomain, "beta-divergence needs x >= 0");
  }
  if (beta <= 0.0 && x == 0.0) {
    Fail(ErrorCode::kDomain,
         "beta-divergence with beta <= 0 needs x > 0; apply a kappa shift");
  }
  if (beta == 1.0) {
    // 0 log 0 = 0
    if (x == 0.0) return y;
    return std::max(0.0, x * std::log(x / y) - x + y);
  }
  if (beta == 0.0) {
    const double r = x / y;
    return std::max(0.0, r - std::log(r) - 1.0);
  }
  // Cancellation near x = y can leave a negative rounding residue.
  return std::max(0.0, std::pow(x, beta) / (beta * (beta - 1.0)) +
                           std::pow(y, beta) / beta -
                           x * std::pow(y, beta - 1.0) / (beta - 1.0));
}

double divergence_sum(const Matrix& x, const Matrix& y, double beta) {
  require_same_shape(x, y, "divergence_sum");
  const double* xs = x.data();
  const double* ys = y.data();
  const Eigen::Index n = x.size();
  double total = 0.0;
  if (beta == 1.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = xs[i];
      const double b = ys[i];
      total += a == 0.0 ? b : std::max(0.0, a * std::log(a / b) - a + b);
    }
  } else if (beta == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = xs[i] / ys[i];
      total += std::max(0.0, r - std::log(r) - 1.0);
    }
  } else if (beta == 2.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = xs[i] - ys[i];
      total += 0.5 * d * d;
    }
  } else {
    const double c1 = 1.0 / (beta * (beta - 1.0));
    const double c2 = 1.0 / beta;
    const double c3 = 1.0 / (beta - 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = xs[i];
      const double b = ys[i];
      total += std::max(0.0, std::pow(a, beta) * c1 + std::pow(b, beta) * c2 -
                                 a * std::pow(b, beta - 1.0) * c3);
    }
  }
  if (!std::isfinite(total)) {
    Fail(ErrorCode::kDomain,
         "objective is not finite; the data likely needs a kappa shift");
  }
  return total;
}

double objective(const DataMatrix& v, const FactorPair& factors, double beta) {
  factors.validate_against(v);
  const Matrix approx = ((factors.w * factors.h).array() + v.kappa()).matrix();
  const Matrix data = v.shifted();
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      total += beta_divergence_scalar(data(i, j), approx(i, j), beta);
    }
  }
  return total;
}

Matrix guarded_divide(const Matrix& numerator, const Matrix& denominator,
                      double floor) {
  require_same_shape(numerator, denominator, "guarded_divide");
  if (!(floor > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "denominator floor must be positive");
  }
  return (numerator.array() / denominator.array().max(floor)).matrix();
}

double default_kappa(const Matrix& values, double beta) {
  const bool zeros = (values.array() == 0.0).any();
  if (beta >= 1.0 && beta <= 2.0 && !zeros) return 0.0;
  return 1e-9 * values.mean();
}

}  // namespace betanmf
