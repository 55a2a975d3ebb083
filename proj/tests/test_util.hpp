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

// Shared helpers for the unit tests.

#ifndef BETANMF_TESTS_TEST_UTIL_HPP_
#define BETANMF_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include <doctest.h>

#include "betanmf/core.hpp"
#include "betanmf/error.hpp"

namespace testutil {

using betanmf::Matrix;

inline constexpr double kBetaGrid[] = {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0};

template <std::size_t N>
Matrix FromArray(const std::array<double, N>& values, Eigen::Index rows,
                 Eigen::Index cols) {
  REQUIRE(static_cast<std::size_t>(rows * cols) == N);
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

inline Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Entries uniform in [lo, hi).
inline Matrix RandomMatrix(std::mt19937_64& rng, Eigen::Index rows,
                           Eigen::Index cols, double lo = 0.1,
                           double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// max |a - b| / max(|b|, tiny), entrywise.
inline double MaxRelErr(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(b.data()[i]), 1e-300);
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / scale);
  }
  return worst;
}

inline double RelErr(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Runs fn and returns the error code it raised; fails the test otherwise.
template <typename Fn>
betanmf::ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const betanmf::Error& e) {
    return e.code();
  }
  FAIL("expected a betanmf::Error");
  return betanmf::ErrorCode::kInvalidArgument;
}

}  // namespace testutil

#endif  // BETANMF_TESTS_TEST_UTIL_HPP_
