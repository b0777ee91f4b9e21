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

// Dual-based partial solutions x(lambda), the arrangement of the hyperplanes
// c_j - <lambda, A^j> = 0 in dual space, distance buckets of the item columns
// (c_j, A^j) around H(lambda) = {y : <(1, -lambda), y> = 0}, and slab counts
// and volumes in the unit cube.
//
// Logarithms are natural throughout.

#ifndef PACKBB_GEOMETRY_H_
#define PACKBB_GEOMETRY_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"
#include "packbb/instance.h"
#include "packbb/lp.h"

namespace packbb {

enum class Assign : std::uint8_t { kZero = 0, kOne = 1, kStar = 2 };

struct PartialSolution {
  std::vector<double> lambda;
  std::vector<Assign> assignment;
  // r_j = c_j - <lambda, A^j>.
  std::vector<double> reduced_costs;
};

// x(lambda): 1 where r_j > tol, 0 where r_j < -tol, star otherwise.
PartialSolution DualSolution(const PackingInstance& inst,
                             std::span<const double> lambda,
                             double tol = 1e-9);

// x agrees with p on every non-star coordinate.
bool Compatible(std::span<const std::uint8_t> x, const PartialSolution& p);

// Exact list of distinct x(lambda), lambda in R, for m = 1: one cell per
// open interval between consecutive distinct breakpoints c_j / a_j (no
// stars) and one per distinct breakpoint (stars exactly at its ties). Stars
// are assigned symbolically from the breakpoint order, not by a float
// tolerance. At most 2n + 1 cells. Throws std::invalid_argument if m != 1.
std::vector<PartialSolution> EnumerateCells1d(const PackingInstance& inst);

struct SampleCellsOptions {
  // Radius of the lambda ball; <= 0 selects
  // (m + 1) * max_j c_j / min positive ||A^j||_2.
  double radius = 0.0;
  // Additional duals to include (for example from slice LPs).
  std::vector<std::vector<double>> extra_lambdas;
};

// Distinct x(lambda) over `trials` lambdas drawn uniformly from a ball,
// followed by the extra duals, in order of discovery. With a fixed seed the
// draws for `trials` are a prefix of the draws for `trials + 1`.
std::vector<PartialSolution> SampleCells(const PackingInstance& inst,
                                         int trials, std::uint64_t seed,
                                         const SampleCellsOptions& options = {});

struct DistanceBuckets {
  // ell -> J_ell(lambda) for ell >= 1, ascending indices.
  std::map<int, std::vector<int>> buckets;
  std::vector<int> remainder;
  // d_j = |r_j| / sqrt(1 + ||lambda||^2).
  std::vector<double> distances;
  double unit = 0.0;  // log(n) / n
};

// J_ell = {j : non-star, d_j in (unit 2^ell, unit 2^(ell+1)]}; everything
// else (stars and d_j <= 2 unit) is in the remainder.
DistanceBuckets Bucketize(const PartialSolution& p, const PackingInstance& inst);

// x(lambda) with lambda the dual of the slice LP=(Ax).
PartialSolution SlicePartialSolution(const PackingInstance& inst,
                                     std::span<const std::uint8_t> x,
                                     const LpOptions& options = {});

struct ParetoDistanceCheck {
  double lhs = 0.0;        // pareto(x)
  double rhs = 0.0;        // sum of d_j over non-star disagreements
  double exact_sum = 0.0;  // sum of |r_j| over non-star disagreements
  bool holds = false;      // lhs >= rhs - 1e-7
  bool equality_holds = false;  // |lhs - exact_sum| <= 1e-7
};

// p must come from the dual of the slice LP=(Ax) (see SlicePartialSolution)
// for the equality to be meaningful; this is not detectable in general.
ParetoDistanceCheck ParetoDistanceBound(const PackingInstance& inst,
                                        std::span<const std::uint8_t> x,
                                        const PartialSolution& p,
                                        const LpOptions& options = {});

// C = (n / log n) * ip_gap.
double DisagreementBudget(int n, double ip_gap);

// For every ell >= 1: #{j in J_ell : x_j != p_j} <= ceil(C / 2^ell).
bool DisagreementCaps(const PackingInstance& inst,
                      std::span<const std::uint8_t> x,
                      const PartialSolution& p, double ip_gap);

// C(a, <=k) as a double.
double BinomialSumReal(int a, int k);

struct CountingBound {
  double bound = 0.0;
  std::int64_t census_count = 0;
  bool holds = false;
};

// Sum over cells of 2^|J_rem| * prod_{ell=1}^{ceil(log2 C)}
// C(|J_ell|, <= ceil(C / 2^ell)), compared with census_count.
CountingBound CountingBoundCheck(const PackingInstance& inst,
                                 std::span<const PartialSolution> cells,
                                 double ip_gap, std::int64_t census_count);

struct SlabReport {
  std::vector<double> direction;
  double width = 0.0;
  std::int64_t count = 0;
  double bound = 0.0;  // 60 n w k
  bool within_bound = false;
};

// Columns (c_j, A^j) as points of R^(m+1).
std::vector<std::vector<double>> ItemPoints(const PackingInstance& inst);

// N_{u,w} = #{y : <u,y> in [-w, w]}. Throws std::invalid_argument unless
// ||u|| = 1 +- 1e-9, w >= 0 and all points have the dimension of u.
SlabReport SlabCount(std::span<const std::vector<double>> points,
                     std::span<const double> u, double width);

// vol({y in [0,1]^k : |<u,y>| <= w}) by inclusion-exclusion over the cube
// vertices. Zero components of u are dropped; the formula loses accuracy
// when some |u_i| is tiny relative to the others.
double SlabVolumeExact(std::span<const double> u, double width);

struct SlabVolumeEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  // 2 sqrt(2) w
  bool pass = false;   // estimate <= bound + 3 stderr
};

SlabVolumeEstimate SlabVolumeCheck(std::span<const double> u, double width,
                                   std::int64_t samples, std::uint64_t seed);

// Uniform random unit vector in R^k.
std::vector<double> RandomDirection(int k, std::uint64_t seed);

nlohmann::json ToJson(const SlabReport& report);

}  // namespace packbb

#endif  // PACKBB_GEOMETRY_H_
