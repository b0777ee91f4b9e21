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

#include "packbb/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "packbb/rng.h"

namespace packbb {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Assign SignToAssign(double r) {
  if (r > 0.0) return Assign::kOne;
  if (r < 0.0) return Assign::kZero;
  return Assign::kStar;
}

std::vector<double> ReducedCosts(const PackingInstance& inst,
                                 std::span<const double> lambda) {
  std::vector<double> r(inst.n());
  for (int j = 0; j < inst.n(); ++j) {
    r[j] = inst.c()[j] - Dot(lambda, inst.column(j));
  }
  return r;
}

}  // namespace

PartialSolution DualSolution(const PackingInstance& inst,
                             std::span<const double> lambda, double tol) {
  if (static_cast<int>(lambda.size()) != inst.m()) {
    throw std::invalid_argument("lambda must have m entries");
  }
  PartialSolution p;
  p.lambda.assign(lambda.begin(), lambda.end());
  p.reduced_costs = ReducedCosts(inst, lambda);
  p.assignment.resize(inst.n());
  for (int j = 0; j < inst.n(); ++j) {
    const double r = p.reduced_costs[j];
    p.assignment[j] = r > tol ? Assign::kOne
                      : r < -tol ? Assign::kZero
                                 : Assign::kStar;
  }
  return p;
}

bool Compatible(std::span<const std::uint8_t> x, const PartialSolution& p) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (p.assignment[j] == Assign::kStar) continue;
    if ((p.assignment[j] == Assign::kOne) != (x[j] != 0)) return false;
  }
  return true;
}

std::vector<PartialSolution> EnumerateCells1d(const PackingInstance& inst) {
  if (inst.m() != 1) {
    throw std::invalid_argument("exact arrangement enumeration needs m = 1");
  }
  const int n = inst.n();
  // r_j(lambda) = c_j - lambda a_j. For a_j != 0 the sign flips at
  // bp_j = c_j / a_j.
  std::vector<double> bp(n, 0.0);
  std::vector<double> breakpoints;
  for (int j = 0; j < n; ++j) {
    if (inst.a(0, j) != 0.0) {
      bp[j] = inst.c()[j] / inst.a(0, j);
      breakpoints.push_back(bp[j]);
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  // Sign of r_j at a lambda strictly above (side = +1), strictly below
  // (side = -1) or equal to (side = 0) the breakpoint value t.
  const auto assign_at = [&](int j, double t, int side) {
    const double a = inst.a(0, j);
    if (a == 0.0) return SignToAssign(inst.c()[j]);
    int rel;  // sign of (bp_j - lambda)
    if (bp[j] > t) {
      rel = 1;
    } else if (bp[j] < t) {
      rel = -1;
    } else {
      rel = -side;
    }
    if (rel == 0) return Assign::kStar;
    return (rel > 0) == (a > 0) ? Assign::kOne : Assign::kZero;
  };

  const auto make_cell = [&](double lambda, double t, int side) {
    PartialSolution p;
    p.lambda = {lambda};
    p.reduced_costs = ReducedCosts(inst, p.lambda);
    p.assignment.resize(n);
    for (int j = 0; j < n; ++j) p.assignment[j] = assign_at(j, t, side);
    return p;
  };

  std::vector<PartialSolution> cells;
  if (breakpoints.empty()) {
    // All columns are zero: the assignment does not depend on lambda.
    cells.push_back(make_cell(0.0, 0.0, 1));
    return cells;
  }
  const std::size_t k = breakpoints.size();
  const double span_width =
      std::max(1.0, breakpoints.back() - breakpoints.front());
  cells.push_back(make_cell(breakpoints.front() - span_width,
                            breakpoints.front(), -1));
  for (std::size_t t = 0; t < k; ++t) {
    cells.push_back(make_cell(breakpoints[t], breakpoints[t], 0));
    const double next =
        t + 1 < k ? breakpoints[t + 1] : breakpoints[t] + 2.0 * span_width;
    cells.push_back(make_cell(0.5 * (breakpoints[t] + next), breakpoints[t], 1));
  }
  return cells;
}

std::vector<PartialSolution> SampleCells(const PackingInstance& inst,
                                         int trials, std::uint64_t seed,
                                         const SampleCellsOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const int m = inst.m();
  double radius = options.radius;
  if (radius <= 0.0) {
    double max_c = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    for (int j = 0; j < inst.n(); ++j) {
      max_c = std::max(max_c, inst.c()[j]);
      const auto col = inst.column(j);
      const double norm = std::sqrt(Dot(col, col));
      if (norm > 0.0) min_norm = std::min(min_norm, norm);
    }
    radius = std::isfinite(min_norm) ? (m + 1) * max_c / min_norm : 1.0;
    if (radius <= 0.0) radius = 1.0;
  }
  std::vector<PartialSolution> cells;
  std::set<std::vector<Assign>> seen;
  const auto add = [&](std::span<const double> lambda) {
    PartialSolution p = DualSolution(inst, lambda);
    if (seen.insert(p.assignment).second) cells.push_back(std::move(p));
  };
  Xoshiro256 rng(seed, 3);
  std::vector<double> lambda(m);
  for (int t = 0; t < trials; ++t) {
    double norm2 = 0.0;
    for (auto& v : lambda) {
      v = rng.Normal();
      norm2 += v * v;
    }
    const double scale =
        radius * std::pow(rng.Uniform01(), 1.0 / m) / std::sqrt(norm2);
    for (auto& v : lambda) v *= scale;
    add(lambda);
  }
  for (const auto& extra : options.extra_lambdas) add(extra);
  return cells;
}

DistanceBuckets Bucketize(const PartialSolution& p,
                          const PackingInstance& inst) {
  const int n = inst.n();
  DistanceBuckets out;
  out.unit = n >= 2 ? std::log(static_cast<double>(n)) / n : 0.0;
  const double scale = std::sqrt(1.0 + Dot(p.lambda, p.lambda));
  out.distances.resize(n);
  for (int j = 0; j < n; ++j) {
    const double d = std::abs(p.reduced_costs[j]) / scale;
    out.distances[j] = d;
    if (p.assignment[j] == Assign::kStar || out.unit <= 0.0 ||
        d <= 2.0 * out.unit) {
      out.remainder.push_back(j);
      continue;
    }
    // Multiplying by powers of two is exact, so the interval endpoints are
    // compared without rounding.
    int ell = 1;
    while (d > std::ldexp(out.unit, ell + 1)) ++ell;
    out.buckets[ell].push_back(j);
  }
  return out;
}

PartialSolution SlicePartialSolution(const PackingInstance& inst,
                                     std::span<const std::uint8_t> x,
                                     const LpOptions& options) {
  const auto slice = SolveEqLp(inst, inst.Occupation(x), options);
  if (!slice.optimal()) {
    throw LpNumericalError("slice LP containing x reported infeasible");
  }
  return DualSolution(inst, slice.lambda);
}

ParetoDistanceCheck ParetoDistanceBound(const PackingInstance& inst,
                                        std::span<const std::uint8_t> x,
                                        const PartialSolution& p,
                                        const LpOptions& options) {
  ParetoDistanceCheck check;
  const auto slice = SolveEqLp(inst, inst.Occupation(x), options);
  if (!slice.optimal()) {
    throw LpNumericalError("slice LP containing x reported infeasible");
  }
  check.lhs = slice.value - inst.Value(x);
  const double scale = std::sqrt(1.0 + Dot(p.lambda, p.lambda));
  for (int j = 0; j < inst.n(); ++j) {
    if (p.assignment[j] == Assign::kStar) continue;
    if ((p.assignment[j] == Assign::kOne) == (x[j] != 0)) continue;
    const double r = std::abs(p.reduced_costs[j]);
    check.exact_sum += r;
    check.rhs += r / scale;
  }
  check.holds = check.lhs >= check.rhs - 1e-7;
  check.equality_holds = std::abs(check.lhs - check.exact_sum) <= 1e-7;
  return check;
}

double DisagreementBudget(int n, double ip_gap) {
  if (n < 2) return 0.0;
  return n / std::log(static_cast<double>(n)) * ip_gap;
}

bool DisagreementCaps(const PackingInstance& inst,
                      std::span<const std::uint8_t> x,
                      const PartialSolution& p, double ip_gap) {
  const double budget = DisagreementBudget(inst.n(), ip_gap);
  const auto buckets = Bucketize(p, inst);
  for (const auto& [ell, items] : buckets.buckets) {
    std::int64_t disagreements = 0;
    for (int j : items) {
      if ((p.assignment[j] == Assign::kOne) != (x[j] != 0)) ++disagreements;
    }
    const double cap = std::ceil(std::ldexp(budget, -ell));
    if (static_cast<double>(disagreements) > cap) return false;
  }
  return true;
}

double BinomialSumReal(int a, int k) {
  if (k < 0) return 0.0;
  double term = 1.0;
  double sum = 1.0;
  for (int i = 1; i <= std::min(a, k); ++i) {
    term = term * (a - i + 1) / i;
    sum += term;
  }
  return sum;
}

CountingBound CountingBoundCheck(const PackingInstance& inst,
                                 std::span<const PartialSolution> cells,
                                 double ip_gap, std::int64_t census_count) {
  CountingBound out;
  out.census_count = census_count;
  const double budget = DisagreementBudget(inst.n(), ip_gap);
  const int top = budget > 1.0 ? static_cast<int>(std::ceil(std::log2(budget)))
                               : 0;
  for (const auto& cell : cells) {
    const auto buckets = Bucketize(cell, inst);
    double term = std::ldexp(1.0, static_cast<int>(buckets.remainder.size()));
    for (int ell = 1; ell <= top; ++ell) {
      const auto it = buckets.buckets.find(ell);
      const int size = it == buckets.buckets.end()
                           ? 0
                           : static_cast<int>(it->second.size());
      term *= BinomialSumReal(size,
                              static_cast<int>(std::ceil(std::ldexp(budget, -ell))));
    }
    out.bound += term;
  }
  out.holds = static_cast<double>(census_count) <= out.bound;
  return out;
}

std::vector<std::vector<double>> ItemPoints(const PackingInstance& inst) {
  std::vector<std::vector<double>> points(inst.n());
  for (int j = 0; j < inst.n(); ++j) {
    auto& y = points[j];
    y.reserve(inst.m() + 1);
    y.push_back(inst.c()[j]);
    const auto col = inst.column(j);
    y.insert(y.end(), col.begin(), col.end());
  }
  return points;
}

SlabReport SlabCount(std::span<const std::vector<double>> points,
                     std::span<const double> u, double width) {
  if (std::abs(std::sqrt(Dot(u, u)) - 1.0) > 1e-9) {
    throw std::invalid_argument("slab direction must be a unit vector");
  }
  if (!(width >= 0.0)) throw std::invalid_argument("slab width must be >= 0");
  SlabReport report;
  report.direction.assign(u.begin(), u.end());
  report.width = width;
  for (const auto& y : points) {
    if (y.size() != u.size()) {
      throw std::invalid_argument("point dimension differs from direction");
    }
    const double h = Dot(u, y);
    if (h >= -width && h <= width) ++report.count;
  }
  report.bound = 60.0 * static_cast<double>(points.size()) * width *
                 static_cast<double>(u.size());
  report.within_bound = static_cast<double>(report.count) <= report.bound;
  return report;
}

double SlabVolumeExact(std::span<const double> u, double width) {
  std::vector<double> v;
  for (double ui : u) {
    if (ui != 0.0) v.push_back(ui);
  }
  const int k = static_cast<int>(v.size());
  if (k == 0) return width >= 0.0 ? 1.0 : 0.0;
  // vol{y in [0,1]^k : <v,y> <= t}
  //   = sum_S (-1)^|S| (t - sum_{i in S} v_i)_+^k / (k! prod v_i),
  // valid for any signs of the nonzero v_i.
  double denom = std::tgamma(k + 1.0);
  for (double vi : v) denom *= vi;
  const auto below = [&](double t) {
    double total = 0.0;
    for (std::uint32_t s = 0; s < (1u << k); ++s) {
      double shift = 0.0;
      int bits = 0;
      for (int i = 0; i < k; ++i) {
        if ((s >> i) & 1) {
          shift += v[i];
          ++bits;
        }
      }
      const double z = t - shift;
      if (z > 0.0) total += (bits % 2 ? -1.0 : 1.0) * std::pow(z, k);
    }
    return total / denom;
  };
  const double vol = below(width) - below(-width);
  return std::clamp(vol, 0.0, 1.0);
}

SlabVolumeEstimate SlabVolumeCheck(std::span<const double> u, double width,
                                   std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  Xoshiro256 rng(seed, 5);
  const std::size_t k = u.size();
  std::vector<double> y(k);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (auto& v : y) v = rng.Uniform01();
    const double h = Dot(u, y);
    if (h >= -width && h <= width) ++hits;
  }
  SlabVolumeEstimate out;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  out.estimate = p;
  out.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  out.bound = 2.0 * std::numbers::sqrt2 * width;
  out.pass = out.estimate <= out.bound + 3.0 * out.stderr_;
  return out;
}

std::vector<double> RandomDirection(int k, std::uint64_t seed) {
  Xoshiro256 rng(seed, 4);
  std::vector<double> u(k);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : u) {
      v = rng.Normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : u) v *= inv;
  return u;
}

nlohmann::json ToJson(const SlabReport& report) {
  return {{"direction", report.direction},
          {"width", report.width},
          {"count", report.count},
          {"bound", report.bound},
          {"within_bound", report.within_bound}};
}

}  // namespace packbb
