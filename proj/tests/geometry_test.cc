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


#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "packbb/geometry.h"
#include "packbb/instance.h"
#include "packbb/oracle.h"
#include "packbb/rng.h"
#include "test_oracles.h"

namespace packbb {
namespace {

using testing::RandomBeta;
using testing::TwoItemInstance;

constexpr Assign k0 = Assign::kZero;
constexpr Assign k1 = Assign::kOne;
constexpr Assign kS = Assign::kStar;

TEST_CASE("dual solution examples") {
  const auto inst = TwoItemInstance();
  const auto p = DualSolution(inst, std::vector<double>{1.5});
  CHECK(p.reduced_costs[0] == doctest::Approx(0.0));
  CHECK(p.reduced_costs[1] == doctest::Approx(-0.25));
  CHECK(p.assignment == std::vector<Assign>{kS, k0});

  const auto gen = Generate(2, 30, std::vector<double>{0.2, 0.3}, 3);
  const auto zero = DualSolution(gen, std::vector<double>{0.0, 0.0});
  for (auto a : zero.assignment) CHECK(a == k1);
  const auto huge = DualSolution(gen, std::vector<double>{10.0, 10.0});
  for (auto a : huge.assignment) CHECK(a == k0);
  CHECK_THROWS(DualSolution(gen, std::vector<double>{1.0}));
}

TEST_CASE("compatibility") {
  PartialSolution p;
  p.assignment = {k1, k0};
  CHECK(Compatible(BinaryVector{1, 0}, p));
  CHECK_FALSE(Compatible(BinaryVector{1, 1}, p));
  p.assignment = {kS, kS};
  CHECK(Compatible(BinaryVector{0, 1}, p));
}

TEST_CASE("slice duals are compatible with the slice optimum") {
  Xoshiro256 rng(21);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + static_cast<int>(rng.Below(3));
    const int n = m + 1 + static_cast<int>(rng.Below(12));
    const auto inst = Generate(m, n, RandomBeta(m, rng), rng());
    BinaryVector xbar(n);
    for (auto& v : xbar) v = rng.Below(2);
    const auto lp = SolveEqLp(inst, inst.Occupation(xbar));
    REQUIRE(lp.optimal());
    const auto p = DualSolution(inst, lp.lambda);
    for (int j = 0; j < n; ++j) {
      if (IsFractional(lp.x[j]) || p.assignment[j] == kS) continue;
      CHECK((p.assignment[j] == k1) == (lp.x[j] > 0.5));
    }
  }
}

TEST_CASE("exact cells for one row") {
  const auto one = PackingInstance::FromRows({{0.5}}, {0.5}, {0.25});
  const auto cells = EnumerateCells1d(one);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].assignment == std::vector<Assign>{k1});
  CHECK(cells[0].lambda[0] < 1.0);
  CHECK(cells[1].assignment == std::vector<Assign>{kS});
  CHECK(cells[1].lambda[0] == 1.0);
  CHECK(cells[2].assignment == std::vector<Assign>{k0});
  CHECK(cells[2].lambda[0] > 1.0);

  CHECK(EnumerateCells1d(TwoItemInstance()).size() == 5);

  // Two items sharing a breakpoint: both are stars at the same lambda.
  const auto tied = PackingInstance::FromRows({{0.2, 0.4}}, {0.1, 0.2}, {0.3});
  const auto tc = EnumerateCells1d(tied);
  REQUIRE(tc.size() == 3);
  CHECK(tc[1].assignment == std::vector<Assign>{kS, kS});

  CHECK_THROWS(EnumerateCells1d(Generate(2, 5, std::vector<double>{0.2, 0.2}, 1)));
}

TEST_CASE("sampled duals land in exact cells") {
  for (int n : {10, 50, 200}) {
    const auto inst = Generate(1, n, std::vector<double>{0.25}, 1000 + n);
    const auto cells = EnumerateCells1d(inst);
    CHECK(cells.size() <= static_cast<std::size_t>(2 * n + 1));
    std::set<std::vector<Assign>> exact;
    for (const auto& c : cells) exact.insert(c.assignment);
    CHECK(exact.size() == cells.size());
    const auto sampled = SampleCells(inst, 10000, n);
    CHECK(sampled.size() <= cells.size());
    for (const auto& s : sampled) CHECK(exact.contains(s.assignment));
  }
}

TEST_CASE("cell sampling contract") {
  const auto inst = Generate(2, 20, std::vector<double>{0.2, 0.3}, 4);
  CHECK(SampleCells(inst, 1, 9).size() == 1);
  const auto a = SampleCells(inst, 500, 9);
  const auto b = SampleCells(inst, 500, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].assignment == b[k].assignment);
    CHECK(a[k].lambda == b[k].lambda);
  }
  // Prefix property: the cells of a shorter run are a prefix.
  const auto longer = SampleCells(inst, 800, 9);
  REQUIRE(longer.size() >= a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(longer[k].lambda == a[k].lambda);
  }
  SampleCellsOptions extra;
  extra.extra_lambdas = {{100.0, 100.0}};
  const auto with_extra = SampleCells(inst, 1, 9, extra);
  CHECK(with_extra.back().assignment == std::vector<Assign>(20, k0));
}

TEST_CASE("distances and buckets") {
  Xoshiro256 rng(22);
  for (int t = 0; t < 50; ++t) {
    const int m = 1 + static_cast<int>(rng.Below(3));
    const auto inst = Generate(m, 100, RandomBeta(m, rng), rng());
    std::vector<double> lambda(m);
    for (auto& v : lambda) v = rng.Uniform(0.0, 2.0);
    const auto p = DualSolution(inst, lambda);
    const auto buckets = Bucketize(p, inst);
    double norm2 = 1.0;
    for (double v : lambda) norm2 += v * v;
    const double unit = std::log(100.0) / 100.0;
    CHECK(buckets.unit == unit);
    std::vector<int> owner(100, 0);
    for (int j : buckets.remainder) ++owner[j];
    for (const auto& [ell, items] : buckets.buckets) {
      CHECK(ell >= 1);
      for (int j : items) {
        ++owner[j];
        const double d = buckets.distances[j];
        CHECK(d > unit * std::pow(2.0, ell));
        CHECK(d <= unit * std::pow(2.0, ell + 1));
        CHECK(p.assignment[j] != kS);
      }
    }
    for (int j : buckets.remainder) {
      CHECK((p.assignment[j] == kS || buckets.distances[j] <= 2 * unit));
    }
    for (int j = 0; j < 100; ++j) {
      CHECK(owner[j] == 1);
      const double r = std::abs(p.reduced_costs[j]);
      CHECK(std::abs(buckets.distances[j] * std::sqrt(norm2) - r) <=
            1e-12 * std::max(r, 1e-300));
    }
  }
}

TEST_CASE("a distance of exactly twice the unit stays in the remainder") {
  // n = 2, lambda = 0: d_j = c_j, unit = log(2) / 2.
  const double unit = std::log(2.0) / 2.0;
  const auto inst =
      PackingInstance::FromRows({{0.5, 0.5}}, {2 * unit, 2 * unit + 1e-3}, {1});
  const auto p = DualSolution(inst, std::vector<double>{0.0});
  const auto buckets = Bucketize(p, inst);
  CHECK(buckets.remainder == std::vector<int>{0});
  REQUIRE(buckets.buckets.count(1) == 1);
  CHECK(buckets.buckets.at(1) == std::vector<int>{1});
}

TEST_CASE("pareto equality on the two-item instance") {
  const auto inst = TwoItemInstance();
  const BinaryVector x{0, 1};
  const auto p = SlicePartialSolution(inst, x);
  CHECK(p.lambda[0] == doctest::Approx(1.5));
  const auto check = ParetoDistanceBound(inst, x, p);
  CHECK(check.lhs == doctest::Approx(0.25));
  CHECK(check.exact_sum == doctest::Approx(0.25));
  CHECK(check.equality_holds);
  CHECK(check.holds);
}

TEST_CASE("pareto machinery over whole cubes") {
  Xoshiro256 rng(23);
  for (int t = 0; t < 15; ++t) {
    const int m = 1 + static_cast<int>(rng.Below(2));
    const int n = m + 1 + static_cast<int>(rng.Below(10 - m));
    const auto inst = Generate(m, n, RandomBeta(m, rng), rng());
    const auto census = GoodSet(inst);
    std::set<BinaryVector> good(census.good_points.begin(),
                                census.good_points.end());
    BinaryVector x(n);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      for (int j = 0; j < n; ++j) x[j] = (s >> j) & 1;
      const auto p = SlicePartialSolution(inst, x);
      const auto check = ParetoDistanceBound(inst, x, p);
      CHECK(check.equality_holds);
      CHECK(check.holds);
      if (good.contains(x)) {
        CHECK(DisagreementCaps(inst, x, p, census.ip_gap));
      }
      if (Compatible(x, p)) CHECK(check.rhs == 0.0);
    }
  }
}

TEST_CASE("counting bound with exact cells") {
  Xoshiro256 rng(24);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.Below(11));
    const auto inst = Generate(1, n, RandomBeta(1, rng), rng());
    const auto census = GoodSet(inst);
    const auto cells = EnumerateCells1d(inst);
    const auto bound =
        CountingBoundCheck(inst, cells, census.ip_gap, census.good_count);
    CHECK(bound.holds);
    // Dropping cells can only lower the bound.
    const auto fewer = CountingBoundCheck(
        inst, std::span(cells).first(cells.size() / 2), census.ip_gap,
        census.good_count);
    CHECK(fewer.bound <= bound.bound);
  }
  // With no gap every factor is 2^|J_rem|.
  const auto inst = TwoItemInstance();
  const auto cells = EnumerateCells1d(inst);
  double expected = 0.0;
  for (const auto& c : cells) {
    expected += std::ldexp(1.0, static_cast<int>(Bucketize(c, inst).remainder.size()));
  }
  CHECK(CountingBoundCheck(inst, cells, 0.0, 1).bound == expected);
}

TEST_CASE("binomial sums as reals") {
  CHECK(BinomialSumReal(5, 2) == 16.0);
  CHECK(BinomialSumReal(3, 7) == 8.0);
  CHECK(BinomialSumReal(0, 0) == 1.0);
  CHECK(BinomialSumReal(4, -1) == 0.0);
}

TEST_CASE("slab counts") {
  const auto inst = Generate(2, 50, std::vector<double>{0.2, 0.3}, 5);
  const auto points = ItemPoints(inst);
  const std::vector<double> e1{1.0, 0.0, 0.0};
  CHECK(SlabCount(points, e1, 1.0).count == 50);
  CHECK(SlabCount(points, RandomDirection(3, 1), 0.0).count == 0);
  const auto report = SlabCount(points, e1, 0.1);
  CHECK(report.bound == doctest::Approx(60 * 50 * 0.1 * 3));
  CHECK(ToJson(report)["count"] == report.count);
  CHECK_THROWS(SlabCount(points, std::vector<double>{1.0, 1.0, 0.0}, 0.1));
  CHECK_THROWS(SlabCount(points, e1, -0.1));
  CHECK_THROWS(SlabCount(points, std::vector<double>{1.0, 0.0}, 0.1));
}

TEST_CASE("slab counts at n = 1000 are usually within the bound") {
  int within = 0;
  for (int t = 0; t < 100; ++t) {
    const auto inst = Generate(1, 1000, std::vector<double>{0.25}, 500 + t);
    const auto u = RandomDirection(2, t);
    within += SlabCount(ItemPoints(inst), u, std::log(1000.0) / 1000.0)
                  .within_bound;
  }
  CHECK(within >= 99);
}

// Independent slab volume for k = 2: integrate the length of the chord
// {y2 : |u1 y1 + u2 y2| <= w} over y1 with a fine midpoint rule.
double ChordVolume2d(double u1, double u2, double w) {
  const int steps = 200000;
  double total = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double y1 = (s + 0.5) / steps;
    double lo = (-w - u1 * y1) / u2;
    double hi = (w - u1 * y1) / u2;
    if (lo > hi) std::swap(lo, hi);
    total += std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.0));
  }
  return total / steps;
}

TEST_CASE("slab volumes") {
  const std::vector<double> e1{1.0, 0.0};
  CHECK(SlabVolumeExact(e1, 0.3) == doctest::Approx(0.3));
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<double> diag{r, r};
  const double exact = SlabVolumeExact(diag, 0.1);
  CHECK(exact == doctest::Approx(ChordVolume2d(r, r, 0.1)).epsilon(1e-6));
  CHECK(exact <= 2 * std::numbers::sqrt2 * 0.1);
  const std::vector<double> mixed{0.6, -0.8};
  CHECK(SlabVolumeExact(mixed, 0.2) ==
        doctest::Approx(ChordVolume2d(0.6, -0.8, 0.2)).epsilon(1e-6));

  const auto mc = SlabVolumeCheck(diag, 0.1, 1000000, 3);
  CHECK(mc.pass);
  CHECK(std::abs(mc.estimate - exact) <= 4 * mc.stderr_ + 1e-12);
  CHECK(SlabVolumeCheck(diag, 0.0, 1000, 3).estimate == 0.0);

  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 4;
    const auto u = RandomDirection(k, 100 + t);
    const double w = 0.02 * (1 + t % 5);
    const auto est = SlabVolumeCheck(u, w, 200000, t);
    CHECK(est.pass);
    CHECK(std::abs(est.estimate - SlabVolumeExact(u, w)) <=
          5 * est.stderr_ + 1e-3);
  }
}

TEST_CASE("random directions") {
  for (int k = 1; k <= 5; ++k) {
    const auto u = RandomDirection(k, k);
    double norm2 = 0.0;
    for (double v : u) norm2 += v * v;
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(RandomDirection(k, k) == u);
  }
}

}  // namespace
}  // namespace packbb
