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

// Test-only reference computations. Deliberately independent of the simplex
// code: brute-force vertex enumeration, the fractional knapsack greedy and
// plain 2^n enumeration.

#ifndef PACKBB_TESTS_TEST_ORACLES_H_
#define PACKBB_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "packbb/instance.h"
#include "packbb/lp.h"
#include "packbb/rng.h"

namespace packbb::testing {

// Solves the k x k system M z = r in place by Gaussian elimination with
// partial pivoting. Returns false if M is (numerically) singular.
inline bool SolveDense(std::vector<double> mat, std::vector<double> rhs, int k,
                       std::vector<double>& z) {
  for (int p = 0; p < k; ++p) {
    int best = p;
    for (int i = p + 1; i < k; ++i) {
      if (std::abs(mat[i * k + p]) > std::abs(mat[best * k + p])) best = i;
    }
    if (std::abs(mat[best * k + p]) < 1e-12) return false;
    for (int c = 0; c < k; ++c) std::swap(mat[p * k + c], mat[best * k + c]);
    std::swap(rhs[p], rhs[best]);
    for (int i = p + 1; i < k; ++i) {
      const double f = mat[i * k + p] / mat[p * k + p];
      for (int c = p; c < k; ++c) mat[i * k + c] -= f * mat[p * k + c];
      rhs[i] -= f * rhs[p];
    }
  }
  z.assign(k, 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int c = i + 1; c < k; ++c) s -= mat[i * k + c] * z[c];
    z[i] = s / mat[i * k + i];
  }
  return true;
}

// Maximum of <c,x> over all basic feasible solutions of
//   Ax + s = rhs, x in [0,1]^n with fixings, s >= 0 (or s = 0 if equality).
// Enumerates every choice of m basic columns among free structurals and
// (for inequalities) slacks, and every 0/1 setting of the remaining free
// structurals. nullopt when no basic solution is feasible.
inline std::optional<double> VertexEnumerationValue(
    const PackingInstance& inst, std::span<const double> rhs,
    const FixedSets& fixed, bool equality) {
  const int m = inst.m();
  const int n = inst.n();
  std::vector<int> state(n, -1);  // -1 free, else fixed value
  for (int j : fixed.zero) state[j] = 0;
  for (int j : fixed.one) state[j] = 1;
  std::vector<int> candidates;  // structural j, or n + i for slack i
  for (int j = 0; j < n; ++j) {
    if (state[j] < 0) candidates.push_back(j);
  }
  if (!equality) {
    for (int i = 0; i < m; ++i) candidates.push_back(n + i);
  }
  const int total = static_cast<int>(candidates.size());
  std::optional<double> best;
  if (total < m) return best;

  std::vector<int> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<char> basic(n + m, 0);
    for (int p : pick) basic[candidates[p]] = 1;
    std::vector<int> nonbasic_free;
    for (int j = 0; j < n; ++j) {
      if (state[j] < 0 && !basic[j]) nonbasic_free.push_back(j);
    }
    std::vector<double> mat(m * m);
    for (int c = 0; c < m; ++c) {
      const int col = candidates[pick[c]];
      for (int i = 0; i < m; ++i) {
        mat[i * m + c] = col < n ? inst.a(i, col) : (col - n == i ? 1.0 : 0.0);
      }
    }
    const std::uint64_t settings = std::uint64_t{1} << nonbasic_free.size();
    for (std::uint64_t s = 0; s < settings; ++s) {
      std::vector<double> x(n, 0.0);
      for (int j = 0; j < n; ++j) {
        if (state[j] >= 0) x[j] = state[j];
      }
      for (std::size_t t = 0; t < nonbasic_free.size(); ++t) {
        x[nonbasic_free[t]] = (s >> t) & 1;
      }
      std::vector<double> r(rhs.begin(), rhs.end());
      for (int j = 0; j < n; ++j) {
        if (basic[j] || x[j] == 0.0) continue;
        for (int i = 0; i < m; ++i) r[i] -= inst.a(i, j) * x[j];
      }
      std::vector<double> z;
      if (!SolveDense(mat, r, m, z)) break;  // singular basis for all s
      bool ok = true;
      for (int c = 0; c < m && ok; ++c) {
        const int col = candidates[pick[c]];
        if (col < n) {
          ok = z[c] >= -1e-9 && z[c] <= 1.0 + 1e-9;
          x[col] = z[c];
        } else {
          ok = z[c] >= -1e-9;
        }
      }
      if (!ok) continue;
      double value = 0.0;
      for (int j = 0; j < n; ++j) value += inst.c()[j] * x[j];
      if (!best || value > *best) best = value;
    }
    // Next combination.
    int i = m - 1;
    while (i >= 0 && pick[i] == total - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

// Fractional knapsack for m = 1 with fixings: J1 items are packed first,
// then free items by decreasing c_j / a_j. nullopt if J1 alone overflows.
inline std::optional<double> RatioGreedyValue(const PackingInstance& inst,
                                              const FixedSets& fixed) {
  const int n = inst.n();
  double capacity = inst.b()[0];
  double value = 0.0;
  std::vector<char> fixed_mask(n, 0);
  for (int j : fixed.zero) fixed_mask[j] = 1;
  for (int j : fixed.one) {
    fixed_mask[j] = 1;
    capacity -= inst.a(0, j);
    value += inst.c()[j];
  }
  if (capacity < -1e-9) return std::nullopt;
  std::vector<int> order;
  for (int j = 0; j < n; ++j) {
    if (!fixed_mask[j]) order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    return inst.c()[p] * inst.a(0, q) > inst.c()[q] * inst.a(0, p);
  });
  for (int j : order) {
    if (capacity <= 0.0) break;
    const double a = inst.a(0, j);
    const double take = a <= capacity ? 1.0 : capacity / a;
    value += take * inst.c()[j];
    capacity -= take * a;
  }
  return value;
}

// Plain enumeration of {0,1}^n (lexicographic order).
inline double BruteForceIp(const PackingInstance& inst) {
  const int n = inst.n();
  double best = 0.0;
  BinaryVector x(n);
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    for (int j = 0; j < n; ++j) x[j] = (s >> j) & 1;
    if (!inst.Feasible(x)) continue;
    best = std::max(best, inst.Value(x));
  }
  return best;
}

// The running two-item example: c = (0.9, 0.5), A = ((0.6, 0.5)), b = 0.8.
inline PackingInstance TwoItemInstance() {
  return PackingInstance::FromRows({{0.6, 0.5}}, {0.9, 0.5}, {0.8});
}

// Random fixings (disjoint) for property tests.
inline FixedSets RandomFixings(int n, Xoshiro256& rng) {
  FixedSets fixed;
  for (int j = 0; j < n; ++j) {
    const auto r = rng.Below(5);
    if (r == 0) fixed.zero.push_back(j);
    if (r == 1) fixed.one.push_back(j);
  }
  return fixed;
}

inline std::vector<double> RandomBeta(int m, Xoshiro256& rng, double lo = 0.1,
                                      double hi = 0.45) {
  std::vector<double> beta(m);
  for (auto& v : beta) v = rng.Uniform(lo, hi);
  return beta;
}

}  // namespace packbb::testing

#endif  // PACKBB_TESTS_TEST_ORACLES_H_
