// Copyright 2026 The packbb Authors
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

#include "packbb/instance.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>

#include "packbb/rng.h"

namespace packbb {
namespace {

bool OutsideUnit(double v) { return !(v >= 0.0 && v <= 1.0); }

std::vector<std::string_view> SplitTokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
T ParseNumber(std::string_view token, int line, const std::string& field) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, field + ": cannot parse '" + std::string(token) +
                               "'");
  }
  return value;
}

// Content lines (non-blank, non-comment) with their 1-based line numbers.
std::vector<std::pair<int, std::string>> ContentLines(std::istream& in) {
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

std::vector<double> ParseRow(const std::pair<int, std::string>& line,
                             std::size_t expected, const std::string& name) {
  const auto tokens = SplitTokens(line.second);
  if (tokens.size() != expected) {
    throw StructuralError("line " + std::to_string(line.first) + ": " + name +
                          " has " + std::to_string(tokens.size()) +
                          " entries, expected " + std::to_string(expected));
  }
  std::vector<double> row;
  row.reserve(expected);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    row.push_back(ParseNumber<double>(
        tokens[k], line.first, name + "[" + std::to_string(k + 1) + "]"));
  }
  return row;
}

}  // namespace

PackingInstance PackingInstance::FromRows(
    const std::vector<std::vector<double>>& rows, std::vector<double> c,
    std::vector<double> b, std::optional<std::uint64_t> seed) {
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(c.size());
  if (m < 1) throw StructuralError("instance needs at least one row");
  if (n < 1) throw StructuralError("instance needs at least one variable");
  if (static_cast<int>(b.size()) != m) {
    throw StructuralError("b has " + std::to_string(b.size()) +
                          " entries, expected m = " + std::to_string(m));
  }
  PackingInstance inst;
  inst.m_ = m;
  inst.n_ = n;
  inst.a_.assign(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw StructuralError("row " + std::to_string(i + 1) + " of A has " +
                            std::to_string(rows[i].size()) +
                            " entries, expected n = " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      inst.a_[static_cast<std::size_t>(j) * m + i] = rows[i][j];
      inst.out_of_range_ |= OutsideUnit(rows[i][j]);
    }
  }
  for (double v : c) inst.out_of_range_ |= OutsideUnit(v);
  inst.c_ = std::move(c);
  inst.b_ = std::move(b);
  inst.seed_ = seed;
  return inst;
}

std::vector<double> PackingInstance::Occupation(
    std::span<const double> x) const {
  std::vector<double> ax(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (x[j] == 0.0) continue;
    const auto col = column(j);
    for (int i = 0; i < m_; ++i) ax[i] += col[i] * x[j];
  }
  return ax;
}

std::vector<double> PackingInstance::Occupation(
    std::span<const std::uint8_t> x) const {
  std::vector<double> ax(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (!x[j]) continue;
    const auto col = column(j);
    for (int i = 0; i < m_; ++i) ax[i] += col[i];
  }
  return ax;
}

double PackingInstance::Value(std::span<const double> x) const {
  double v = 0.0;
  for (int j = 0; j < n_; ++j) v += c_[j] * x[j];
  return v;
}

double PackingInstance::Value(std::span<const std::uint8_t> x) const {
  double v = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (x[j]) v += c_[j];
  }
  return v;
}

bool PackingInstance::Feasible(std::span<const std::uint8_t> x,
                               double tol) const {
  const auto ax = Occupation(x);
  for (int i = 0; i < m_; ++i) {
    if (ax[i] > b_[i] + tol) return false;
  }
  return true;
}

PackingInstance PackingInstance::WithRhs(std::vector<double> rhs) const {
  if (static_cast<int>(rhs.size()) != m_) {
    throw StructuralError("rhs has wrong length");
  }
  PackingInstance copy = *this;
  copy.b_ = std::move(rhs);
  return copy;
}

PackingInstance Generate(int m, int n, std::span<const double> beta,
                         std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (n < m + 1) {
    throw std::invalid_argument("n must be at least m + 1 (got n = " +
                                std::to_string(n) +
                                ", m = " + std::to_string(m) + ")");
  }
  if (static_cast<int>(beta.size()) != m) {
    throw std::invalid_argument("beta must have m entries");
  }
  for (double bi : beta) {
    if (!(bi > 0.0 && bi < 0.5)) {
      throw std::invalid_argument("beta entries must lie in (0, 1/2)");
    }
  }
  Xoshiro256 a_stream(seed, 0);
  Xoshiro256 c_stream(seed, 1);
  std::vector<std::vector<double>> rows(m, std::vector<double>(n));
  for (auto& row : rows) {
    for (double& v : row) v = a_stream.Uniform01();
  }
  std::vector<double> c(n);
  for (double& v : c) v = c_stream.Uniform01();
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) b[i] = beta[i] * n;
  return PackingInstance::FromRows(rows, std::move(c), std::move(b), seed);
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void Save(const PackingInstance& inst, std::ostream& out) {
  out << "# packbb instance\n";
  if (inst.seed()) out << "# seed " << *inst.seed() << "\n";
  out << inst.m() << " " << inst.n() << "\n";
  const auto write_row = [&out](auto&& values) {
    bool first = true;
    for (double v : values) {
      if (!first) out << ' ';
      out << FormatDouble(v);
      first = false;
    }
    out << '\n';
  };
  write_row(inst.b());
  write_row(inst.c());
  std::vector<double> row(inst.n());
  for (int i = 0; i < inst.m(); ++i) {
    for (int j = 0; j < inst.n(); ++j) row[j] = inst.a(i, j);
    write_row(row);
  }
}

void Save(const PackingInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  Save(inst, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

PackingInstance Load(std::istream& in) {
  const auto lines = ContentLines(in);
  if (lines.empty()) throw StructuralError("empty instance file");
  const auto header = SplitTokens(lines[0].second);
  if (header.size() != 2) {
    throw StructuralError("line " + std::to_string(lines[0].first) +
                          ": header must be 'm n'");
  }
  const int m = ParseNumber<int>(header[0], lines[0].first, "m");
  const int n = ParseNumber<int>(header[1], lines[0].first, "n");
  if (m < 1 || n < 1) {
    throw StructuralError("line " + std::to_string(lines[0].first) +
                          ": m and n must be positive");
  }
  if (lines.size() != static_cast<std::size_t>(3 + m)) {
    throw StructuralError("expected " + std::to_string(3 + m) +
                          " content lines for m = " + std::to_string(m) +
                          ", found " + std::to_string(lines.size()));
  }
  auto b = ParseRow(lines[1], m, "b");
  auto c = ParseRow(lines[2], n, "c");
  std::vector<std::vector<double>> rows;
  rows.reserve(m);
  for (int i = 0; i < m; ++i) {
    rows.push_back(ParseRow(lines[3 + i], n, "A row " + std::to_string(i + 1)));
  }
  return PackingInstance::FromRows(rows, std::move(c), std::move(b));
}

PackingInstance Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Load(in);
}

}  // namespace packbb
