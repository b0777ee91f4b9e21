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

// Packing instances max <c,x> s.t. Ax <= b, x in {0,1}^n, their seeded random
// generation and the line-oriented text file format.

#ifndef PACKBB_INSTANCE_H_
#define PACKBB_INSTANCE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace packbb {

// A 0/1 point, one byte per coordinate.
using BinaryVector = std::vector<std::uint8_t>;

// Malformed instance file. The message names the line and the field.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Dimensions that do not agree (wrong row length, missing rows, ...).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable (A, c, b) triple. A is stored column-major so that a column A^j
// is a contiguous span of length m.
class PackingInstance {
 public:
  PackingInstance() = default;

  // Builds an instance from explicit data. Only dimensions are validated:
  // `rows` must be m rows of length n, c of length n, b of length m, m >= 1,
  // n >= 1. Entry ranges are not checked; `entries_out_of_range()` reports
  // whether any A or c entry lies outside [0, 1].
  static PackingInstance FromRows(const std::vector<std::vector<double>>& rows,
                                  std::vector<double> c, std::vector<double> b,
                                  std::optional<std::uint64_t> seed = {});

  int m() const { return m_; }
  int n() const { return n_; }

  double a(int i, int j) const { return a_[static_cast<std::size_t>(j) * m_ + i]; }
  std::span<const double> column(int j) const {
    return {a_.data() + static_cast<std::size_t>(j) * m_,
            static_cast<std::size_t>(m_)};
  }
  std::span<const double> c() const { return c_; }
  std::span<const double> b() const { return b_; }
  double beta(int i) const { return b_[i] / n_; }

  // Absent for instances read from a file.
  std::optional<std::uint64_t> seed() const { return seed_; }

  // Warning flag: some A or c entry is outside [0, 1]. Allowed for loaded
  // instances; never set for generated ones.
  bool entries_out_of_range() const { return out_of_range_; }

  // Ax for a real or 0/1 point.
  std::vector<double> Occupation(std::span<const double> x) const;
  std::vector<double> Occupation(std::span<const std::uint8_t> x) const;

  double Value(std::span<const double> x) const;
  double Value(std::span<const std::uint8_t> x) const;

  // Ax <= b + tol componentwise.
  bool Feasible(std::span<const std::uint8_t> x, double tol = 1e-9) const;

  // Same instance with b replaced by `rhs` (must have length m).
  PackingInstance WithRhs(std::vector<double> rhs) const;

  friend bool operator==(const PackingInstance&,
                         const PackingInstance&) = default;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<double> a_;
  std::vector<double> c_;
  std::vector<double> b_;
  std::optional<std::uint64_t> seed_;
  bool out_of_range_ = false;
};

// Random instance: A and c entries i.i.d. uniform on [0,1] drawn from
// Xoshiro256(seed, 0) for A in row-major order and Xoshiro256(seed, 1) for c;
// b_i = beta_i * n. Throws std::invalid_argument unless m >= 1, n >= m + 1,
// beta has m entries and every beta_i is in (0, 1/2).
PackingInstance Generate(int m, int n, std::span<const double> beta,
                         std::uint64_t seed);

// Text format:
//   line 1        m n
//   line 2        b_1 ... b_m
//   line 3        c_1 ... c_n
//   next m lines  row i of A
// Reals are written in shortest round-trip decimal form (at most 17
// significant digits). Lines starting with '#' are comments; blank lines are
// ignored.
void Save(const PackingInstance& inst, std::ostream& out);
void Save(const PackingInstance& inst, const std::filesystem::path& path);

// Throws ParseError for unparsable tokens and StructuralError for dimension
// mismatches. The loaded instance has no seed.
PackingInstance Load(std::istream& in);
PackingInstance Load(const std::filesystem::path& path);

// Shortest decimal representation that reads back to the same double.
std::string FormatDouble(double v);

}  // namespace packbb

#endif  // PACKBB_INSTANCE_H_
