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

#include "betanmf/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace betanmf {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool ParseDouble(std::string_view token, double& out) {
  token = Trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void ParseFail(const std::string& source, std::size_t line,
                            std::size_t column, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ":" << column << ": " << what;
  Fail(ErrorCode::kParse, msg.str());
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

void CheckValue(double x, const std::string& source, std::size_t line,
                std::size_t column) {
  if (!std::isfinite(x)) {
    ParseFail(source, line, column, "value is not finite");
  }
  if (x < 0.0) {
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": negative value " << x
        << " (row " << line << ", column " << column << ")";
    Fail(ErrorCode::kDomain, msg.str());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

MatrixFormatKind parse_format(const std::string& name) {
  const std::string lower = Lower(name);
  if (lower == "csv") return MatrixFormatKind::kDenseCsv;
  if (lower == "mtx" || lower == "mm" || lower == "matrixmarket") {
    return MatrixFormatKind::kMatrixMarket;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown matrix format '" + name + "'");
}

DataMatrix parse_csv(const std::string& text, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const std::string_view line =
        nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto tokens = Split(line, ',');
    if (first_content_line) {
      first_content_line = false;
      double probe = 0.0;
      if (!ParseDouble(tokens.front(), probe)) continue;  // header row
    }
    if (cols == 0) cols = tokens.size();
    if (tokens.size() != cols) {
      ParseFail(source, line_no, 1,
                "expected " + std::to_string(cols) + " fields, found " +
                    std::to_string(tokens.size()));
    }
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      double x = 0.0;
      if (!ParseDouble(tokens[c], x)) {
        ParseFail(source, line_no, c + 1,
                  "cannot parse '" + std::string(Trim(tokens[c])) + "'");
      }
      CheckValue(x, source, line_no, c + 1);
      values.push_back(x);
    }
    ++rows;
  }
  if (rows == 0) Fail(ErrorCode::kParse, source + ": no data rows");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return DataMatrix(std::move(m));
}

DataMatrix parse_matrix_market(const std::string& text,
                               std::int64_t densify_limit,
                               const std::string& source) {
  std::string_view rest(text);
  std::size_t line_no = 0;
  const auto next_line = [&]() -> std::string_view {
    const auto nl = rest.find('\n');
    std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    return line;
  };

  const auto banner = SplitWhitespace(next_line());
  if (banner.size() < 5 || Lower(banner[0]) != "%%matrixmarket" ||
      Lower(banner[1]) != "matrix") {
    ParseFail(source, 1, 1, "missing %%MatrixMarket matrix banner");
  }
  const std::string layout = Lower(banner[2]);
  const std::string field = Lower(banner[3]);
  const std::string symmetry = Lower(banner[4]);
  if (layout != "coordinate" && layout != "array") {
    ParseFail(source, 1, 1, "unsupported layout '" + layout + "'");
  }
  if (field != "real" && field != "integer" &&
      !(field == "pattern" && layout == "coordinate")) {
    ParseFail(source, 1, 1, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    ParseFail(source, 1, 1, "unsupported symmetry '" + symmetry + "'");
  }

  std::vector<std::string_view> size_tokens;
  while (!rest.empty()) {
    const std::string_view line = next_line();
    const std::string_view t = Trim(line);
    if (t.empty() || t.front() == '%') continue;
    size_tokens = SplitWhitespace(line);
    break;
  }
  const std::size_t expected = layout == "coordinate" ? 3 : 2;
  if (size_tokens.size() != expected) {
    ParseFail(source, line_no, 1, "malformed size line");
  }
  std::int64_t dims[3] = {0, 0, 0};
  for (std::size_t i = 0; i < expected; ++i) {
    const auto tok = size_tokens[i];
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), dims[i]);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || dims[i] < 0) {
      ParseFail(source, line_no, i + 1, "bad size value");
    }
  }
  const std::int64_t rows = dims[0];
  const std::int64_t cols = dims[1];
  if (rows < 1 || cols < 1) ParseFail(source, line_no, 1, "empty matrix");
  if (rows > densify_limit / cols) {
    Fail(ErrorCode::kLimit,
         source + ": densifying " + std::to_string(rows) + "x" +
             std::to_string(cols) + " exceeds the limit of " +
             std::to_string(densify_limit) + " entries");
  }
  Matrix m = Matrix::Zero(rows, cols);

  std::int64_t seen = 0;
  const std::int64_t wanted = layout == "coordinate" ? dims[2] : rows * cols;
  while (!rest.empty() && seen < wanted) {
    const std::string_view line = next_line();
    const std::string_view t = Trim(line);
    if (t.empty() || t.front() == '%') continue;
    const auto tokens = SplitWhitespace(line);
    if (layout == "array") {
      double x = 0.0;
      if (tokens.size() != 1 || !ParseDouble(tokens[0], x)) {
        ParseFail(source, line_no, 1, "expected one value");
      }
      CheckValue(x, source, line_no, 1);
      // column-major order
      m(seen % rows, seen / rows) = x;
    } else {
      const std::size_t need = field == "pattern" ? 2 : 3;
      if (tokens.size() < need) ParseFail(source, line_no, 1, "short entry line");
      std::int64_t idx[2];
      for (int i = 0; i < 2; ++i) {
        const auto tok = tokens[static_cast<std::size_t>(i)];
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx[i]);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
          ParseFail(source, line_no, static_cast<std::size_t>(i) + 1, "bad index");
        }
      }
      if (idx[0] < 1 || idx[0] > rows || idx[1] < 1 || idx[1] > cols) {
        ParseFail(source, line_no, 1, "index out of range");
      }
      double x = 1.0;
      if (field != "pattern" && !ParseDouble(tokens[2], x)) {
        ParseFail(source, line_no, 3, "cannot parse value");
      }
      CheckValue(x, source, line_no, 3);
      m(idx[0] - 1, idx[1] - 1) += x;
      if (symmetry == "symmetric" && idx[0] != idx[1]) {
        if (idx[1] > rows || idx[0] > cols) {
          ParseFail(source, line_no, 1, "symmetric entry outside the matrix");
        }
        m(idx[1] - 1, idx[0] - 1) += x;
      }
    }
    ++seen;
  }
  if (seen < wanted) {
    ParseFail(source, line_no, 1,
              "expected " + std::to_string(wanted) + " entries, found " +
                  std::to_string(seen));
  }
  return DataMatrix(std::move(m));
}

DataMatrix load_matrix(const std::filesystem::path& path,
                       const MatrixFormat& format) {
  const std::string text = ReadFile(path);
  if (format.kind == MatrixFormatKind::kDenseCsv) {
    return parse_csv(text, path.string());
  }
  return parse_matrix_market(text, format.densify_limit, path.string());
}

void save_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += FormatDouble(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

void save_factors(const FitResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  save_matrix_csv(result.factors.w, dir / "W.csv");
  save_matrix_csv(result.factors.h, dir / "H.csv");
}

void save_trace(const FitResult& result, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << kTraceHeader << '\n';
  for (const TraceRow& row : result.trace) {
    out << row.iteration << ',' << FormatDouble(row.objective) << ','
        << FormatDouble(row.seconds) << ',' << FormatDouble(row.kkt.res_w)
        << ',' << FormatDouble(row.kkt.res_h) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace betanmf
