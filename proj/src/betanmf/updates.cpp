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

#include "betanmf/updates.hpp"

#include <cmath>

namespace betanmf {

namespace {

double EffectiveGamma(double beta, const UpdateOptions& options) {
  return options.heuristic_gamma_one ? 1.0 : gamma_exponent(beta);
}

// factor .* (numerator ./ denominator)^gamma
Matrix ApplyRatio(const Matrix& factor, const Matrix& numerator,
                  const Matrix& denominator, double gamma, double floor) {
  require_same_shape(factor, numerator, "update numerator");
  require_same_shape(factor, denominator, "update denominator");
  auto ratio = numerator.array() / denominator.array().max(floor);
  if (gamma == 1.0) return (factor.array() * ratio).matrix();
  if (gamma == 0.5) return (factor.array() * ratio.sqrt()).matrix();
  return (factor.array() * ratio.pow(gamma)).matrix();
}

Matrix Approx(const Matrix& w, const Matrix& h, double kappa) {
  Matrix out = w * h;
  if (kappa != 0.0) out.array() += kappa;
  return out;
}

const Matrix& ApproxOrCompute(const Matrix& w, const Matrix& h,
                              const UpdateOptions& options,
                              const Matrix* approx, Matrix& storage) {
  if (approx != nullptr) return *approx;
  storage = Approx(w, h, options.kappa);
  return storage;
}

void CheckBmmShapes(const Matrix& data, const Matrix& w, const Matrix& h) {
  if (w.cols() != h.rows() || w.rows() != data.rows() ||
      h.cols() != data.cols()) {
    Fail(ErrorCode::kDimension, "update: factor shapes do not match data");
  }
}

void CheckAnchorShapes(const Matrix& data, const MajorizerAnchor& anchor) {
  CheckBmmShapes(data, anchor.w_tilde, anchor.h_tilde);
  require_same_shape(anchor.v_tilde, data, "anchor product");
}

void RequireFastBeta(double beta) {
  if (!has_fast_path(beta)) {
    Fail(ErrorCode::kInvalidArgument,
         "simplified updates exist only for beta in {0, 1, 2}");
  }
}

bool SameMatrix(const Matrix& a, const Matrix& b) {
  if (a.data() == b.data()) return true;
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

// F x K matrix whose rows all equal the row sums of h (i.e. ones * h^T).
Matrix BroadcastRowSums(const Matrix& h, Eigen::Index rows) {
  const Eigen::RowVectorXd sums = h.rowwise().sum().transpose();
  return sums.replicate(rows, 1);
}

// K x N matrix whose columns all equal the column sums of w (w^T * ones).
Matrix BroadcastColSums(const Matrix& w, Eigen::Index cols) {
  const Eigen::VectorXd sums = w.colwise().sum().transpose();
  return sums.replicate(1, cols);
}

Matrix Reciprocal(const Matrix& m, double floor) {
  return (1.0 / m.array().max(floor)).matrix();
}

}  // namespace

const char* algorithm_name(Algorithm algorithm) {
  return algorithm == Algorithm::kBmm ? "bmm" : "jmm";
}

bool has_fast_path(double beta) {
  return beta == 0.0 || beta == 1.0 || beta == 2.0;
}

Matrix elementwise_power(const Matrix& m, double p) {
  if (p == 0.0) return Matrix::Ones(m.rows(), m.cols());
  if (p == 1.0) return m;
  return m.array().pow(p).matrix();
}

Matrix chi1(const Matrix& m, const Matrix& m_tilde, double beta) {
  require_same_shape(m, m_tilde, "chi1");
  if (beta > 2.0) return m;
  return (elementwise_power(m_tilde, 2.0 - beta).array() /
          elementwise_power(m, 1.0 - beta).array())
      .matrix();
}

Matrix chi2(const Matrix& m, const Matrix& m_tilde, double beta) {
  require_same_shape(m, m_tilde, "chi2");
  if (beta < 1.0) return m;
  return (elementwise_power(m, beta).array() /
          elementwise_power(m_tilde, beta - 1.0).array())
      .matrix();
}

Matrix bmm_update_w(const Matrix& data, const Matrix& w, const Matrix& h,
                    double beta, const UpdateOptions& options,
                    const Matrix* approx) {
  CheckBmmShapes(data, w, h);
  Matrix storage;
  const Matrix& lam = ApproxOrCompute(w, h, options, approx, storage);
  const Matrix base = elementwise_power(lam, beta - 2.0);
  const Matrix num = (base.array() * data.array()).matrix() * h.transpose();
  const Matrix den = (base.array() * lam.array()).matrix() * h.transpose();
  return ApplyRatio(w, num, den, EffectiveGamma(beta, options), options.floor);
}

Matrix bmm_update_h(const Matrix& data, const Matrix& w, const Matrix& h,
                    double beta, const UpdateOptions& options,
                    const Matrix* approx) {
  CheckBmmShapes(data, w, h);
  Matrix storage;
  const Matrix& lam = ApproxOrCompute(w, h, options, approx, storage);
  const Matrix base = elementwise_power(lam, beta - 2.0);
  const Matrix num = w.transpose() * (base.array() * data.array()).matrix();
  const Matrix den = w.transpose() * (base.array() * lam.array()).matrix();
  return ApplyRatio(h, num, den, EffectiveGamma(beta, options), options.floor);
}

JmmTerms make_jmm_terms(const Matrix& data, const MajorizerAnchor& anchor,
                        double beta, bool fast, double floor) {
  CheckAnchorShapes(data, anchor);
  JmmTerms terms;
  terms.beta = beta;
  terms.fast = fast && has_fast_path(beta);
  const Matrix& vt = anchor.v_tilde;
  if (!terms.fast) {
    const Matrix base = elementwise_power(vt, beta - 2.0);
    terms.ratio = (data.array() * base.array()).matrix();
    terms.power = (base.array() * vt.array()).matrix();
  } else if (beta == 0.0) {
    terms.power = Reciprocal(vt, floor);
    terms.ratio =
        (data.array() * terms.power.array() * terms.power.array()).matrix();
  } else if (beta == 1.0) {
    terms.ratio = (data.array() / vt.array().max(floor)).matrix();
    terms.ratio_ht = terms.ratio * anchor.h_tilde.transpose();
    terms.wt_ratio = anchor.w_tilde.transpose() * terms.ratio;
  }
  // beta = 2 reads data and v_tilde directly.
  return terms;
}

Matrix jmm_update_w(const Matrix& data, const MajorizerAnchor& anchor,
                    const Matrix& h_current, double beta,
                    const UpdateOptions& options, const JmmTerms* terms) {
  CheckAnchorShapes(data, anchor);
  require_same_shape(h_current, anchor.h_tilde, "jmm_update_w");
  JmmTerms local;
  if (terms == nullptr || terms->fast || terms->beta != beta) {
    local = make_jmm_terms(data, anchor, beta, false, options.floor);
    terms = &local;
  }
  Matrix num;
  Matrix den;
  if (SameMatrix(h_current, anchor.h_tilde)) {
    num = terms->ratio * anchor.h_tilde.transpose();
    den = terms->power * anchor.h_tilde.transpose();
  } else {
    num = terms->ratio * chi1(h_current, anchor.h_tilde, beta).transpose();
    den = terms->power * chi2(h_current, anchor.h_tilde, beta).transpose();
  }
  return ApplyRatio(anchor.w_tilde, num, den, EffectiveGamma(beta, options),
                    options.floor);
}

Matrix jmm_update_h(const Matrix& data, const MajorizerAnchor& anchor,
                    const Matrix& w_current, double beta,
                    const UpdateOptions& options, const JmmTerms* terms) {
  CheckAnchorShapes(data, anchor);
  require_same_shape(w_current, anchor.w_tilde, "jmm_update_h");
  JmmTerms local;
  if (terms == nullptr || terms->fast || terms->beta != beta) {
    local = make_jmm_terms(data, anchor, beta, false, options.floor);
    terms = &local;
  }
  Matrix num;
  Matrix den;
  if (SameMatrix(w_current, anchor.w_tilde)) {
    num = anchor.w_tilde.transpose() * terms->ratio;
    den = anchor.w_tilde.transpose() * terms->power;
  } else {
    num = chi1(w_current, anchor.w_tilde, beta).transpose() * terms->ratio;
    den = chi2(w_current, anchor.w_tilde, beta).transpose() * terms->power;
  }
  return ApplyRatio(anchor.h_tilde, num, den, EffectiveGamma(beta, options),
                    options.floor);
}

Matrix fast_bmm_update_w(const Matrix& data, const Matrix& w, const Matrix& h,
                         double beta, const UpdateOptions& options,
                         const Matrix* approx) {
  RequireFastBeta(beta);
  CheckBmmShapes(data, w, h);
  Matrix storage;
  const Matrix& lam = ApproxOrCompute(w, h, options, approx, storage);
  const double gamma = EffectiveGamma(beta, options);
  if (beta == 2.0) {
    return ApplyRatio(w, data * h.transpose(), lam * h.transpose(), gamma,
                      options.floor);
  }
  if (beta == 1.0) {
    const Matrix ratio = (data.array() / lam.array().max(options.floor)).matrix();
    return ApplyRatio(w, ratio * h.transpose(), BroadcastRowSums(h, w.rows()),
                      gamma, options.floor);
  }
  const Matrix inv = Reciprocal(lam, options.floor);
  const Matrix ratio = (data.array() * inv.array() * inv.array()).matrix();
  return ApplyRatio(w, ratio * h.transpose(), inv * h.transpose(), gamma,
                    options.floor);
}

Matrix fast_bmm_update_h(const Matrix& data, const Matrix& w, const Matrix& h,
                         double beta, const UpdateOptions& options,
                         const Matrix* approx) {
  RequireFastBeta(beta);
  CheckBmmShapes(data, w, h);
  Matrix storage;
  const Matrix& lam = ApproxOrCompute(w, h, options, approx, storage);
  const double gamma = EffectiveGamma(beta, options);
  if (beta == 2.0) {
    return ApplyRatio(h, w.transpose() * data, w.transpose() * lam, gamma,
                      options.floor);
  }
  if (beta == 1.0) {
    const Matrix ratio = (data.array() / lam.array().max(options.floor)).matrix();
    return ApplyRatio(h, w.transpose() * ratio, BroadcastColSums(w, h.cols()),
                      gamma, options.floor);
  }
  const Matrix inv = Reciprocal(lam, options.floor);
  const Matrix ratio = (data.array() * inv.array() * inv.array()).matrix();
  return ApplyRatio(h, w.transpose() * ratio, w.transpose() * inv, gamma,
                    options.floor);
}

Matrix fast_jmm_update_w(const Matrix& data, const MajorizerAnchor& anchor,
                         const Matrix& h_current, double beta,
                         const UpdateOptions& options, const JmmTerms* terms) {
  RequireFastBeta(beta);
  CheckAnchorShapes(data, anchor);
  require_same_shape(h_current, anchor.h_tilde, "fast_jmm_update_w");
  JmmTerms local;
  if (terms == nullptr || !terms->fast || terms->beta != beta) {
    local = make_jmm_terms(data, anchor, beta, true, options.floor);
    terms = &local;
  }
  const Matrix& ht = anchor.h_tilde;
  const bool at_anchor = SameMatrix(h_current, ht);
  const double gamma = EffectiveGamma(beta, options);
  Matrix num;
  Matrix den;
  if (beta == 1.0) {
    // chi1 = H~, chi2 = H
    return ApplyRatio(anchor.w_tilde, terms->ratio_ht,
                      BroadcastRowSums(h_current, data.rows()), gamma,
                      options.floor);
  }
  if (beta == 0.0) {
    // chi1 = H~^2 ./ H, chi2 = H
    num = at_anchor
              ? Matrix(terms->ratio * ht.transpose())
              : Matrix(terms->ratio *
                       (ht.array().square() / h_current.array())
                           .matrix()
                           .transpose());
    den = terms->power * h_current.transpose();
  } else {
    // chi1 = H, chi2 = H^2 ./ H~
    num = data * h_current.transpose();
    den = at_anchor ? Matrix(anchor.v_tilde * ht.transpose())
                    : Matrix(anchor.v_tilde *
                             (h_current.array().square() / ht.array())
                                 .matrix()
                                 .transpose());
  }
  return ApplyRatio(anchor.w_tilde, num, den, gamma, options.floor);
}

Matrix fast_jmm_update_h(const Matrix& data, const MajorizerAnchor& anchor,
                         const Matrix& w_current, double beta,
                         const UpdateOptions& options, const JmmTerms* terms) {
  RequireFastBeta(beta);
  CheckAnchorShapes(data, anchor);
  require_same_shape(w_current, anchor.w_tilde, "fast_jmm_update_h");
  JmmTerms local;
  if (terms == nullptr || !terms->fast || terms->beta != beta) {
    local = make_jmm_terms(data, anchor, beta, true, options.floor);
    terms = &local;
  }
  const Matrix& wt = anchor.w_tilde;
  const bool at_anchor = SameMatrix(w_current, wt);
  const double gamma = EffectiveGamma(beta, options);
  Matrix num;
  Matrix den;
  if (beta == 1.0) {
    return ApplyRatio(anchor.h_tilde, terms->wt_ratio,
                      BroadcastColSums(w_current, data.cols()), gamma,
                      options.floor);
  }
  if (beta == 0.0) {
    num = at_anchor ? Matrix(wt.transpose() * terms->ratio)
                    : Matrix((wt.array().square() / w_current.array())
                                 .matrix()
                                 .transpose() *
                             terms->ratio);
    den = w_current.transpose() * terms->power;
  } else {
    num = w_current.transpose() * data;
    den = at_anchor ? Matrix(wt.transpose() * anchor.v_tilde)
                    : Matrix((w_current.array().square() / wt.array())
                                 .matrix()
                                 .transpose() *
                             anchor.v_tilde);
  }
  return ApplyRatio(anchor.h_tilde, num, den, gamma, options.floor);
}

Matrix fast_path_update(Target target, const UpdateKind& kind,
                        const Matrix& data, const FactorPair* current,
                        const MajorizerAnchor* anchor, const Matrix* moving,
                        double beta, const UpdateOptions& options) {
  UpdateOptions opts = options;
  opts.heuristic_gamma_one = opts.heuristic_gamma_one || kind.heuristic_gamma_one;
  if (kind.algorithm == Algorithm::kBmm) {
    if (current == nullptr) {
      Fail(ErrorCode::kInvalidArgument, "BMM update needs the current factors");
    }
    return target == Target::kW
               ? fast_bmm_update_w(data, current->w, current->h, beta, opts)
               : fast_bmm_update_h(data, current->w, current->h, beta, opts);
  }
  if (anchor == nullptr || moving == nullptr) {
    Fail(ErrorCode::kInvalidArgument,
         "JMM update needs an anchor and the moving factor");
  }
  return target == Target::kW
             ? fast_jmm_update_w(data, *anchor, *moving, beta, opts)
             : fast_jmm_update_h(data, *anchor, *moving, beta, opts);
}

}  // namespace betanmf
