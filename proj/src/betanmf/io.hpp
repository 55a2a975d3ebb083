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

#ifndef BETANMF_IO_HPP_
#define BETANMF_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "betanmf/core.hpp"
#include "betanmf/solver.hpp"

namespace betanmf {

enum class MatrixFormatKind { kDenseCsv, kMatrixMarket };

struct MatrixFormat {
  MatrixFormatKind kind = MatrixFormatKind::kDenseCsv;
  // Largest F * N accepted when densifying coordinate input.
  std::int64_t densify_limit = 100'000'000;
};

// "csv" or "mtx"; throws kInvalidArgument otherwise.
MatrixFormatKind parse_format(const std::string& name);

// Dense CSV: comma separated, no quoting, an optional header row recognised
// by a non-numeric first token. MatrixMarket: coordinate (real, integer or
// pattern; general or symmetric) or array layout. Missing coordinate entries
// are zero.
DataMatrix load_matrix(const std::filesystem::path& path,
                       const MatrixFormat& format = {});
DataMatrix parse_csv(const std::string& text, const std::string& source = "<memory>");
DataMatrix parse_matrix_market(const std::string& text,
                               std::int64_t densify_limit = 100'000'000,
                               const std::string& source = "<memory>");

// Rows of comma-separated values with 17 significant digits.
void save_matrix_csv(const Matrix& m, const std::filesystem::path& path);
// W.csv and H.csv inside dir, created when missing.
void save_factors(const FitResult& result, const std::filesystem::path& dir);
// Header iter,objective,seconds,kkt_w,kkt_h then one row per outer iteration.
void save_trace(const FitResult& result, const std::filesystem::path& path);

inline constexpr const char* kTraceHeader = "iter,objective,seconds,kkt_w,kkt_h";

}  // namespace betanmf

#endif  // BETANMF_IO_HPP_
