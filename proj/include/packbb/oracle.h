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

// Exhaustive ground truth on small instances: the IP optimum, pareto gaps,
// the good set G = {x in {0,1}^n : pareto(x) <= IPGap(b)} and per-instance
// checks of the tree-size bound 2 |G| C(n, <=m) + 1.

#ifndef PACKBB_ORACLE_H_
#define PACKBB_ORACLE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "packbb/bb.h"
#include "packbb/instance.h"
#include "packbb/lp.h"

namespace packbb {

// Instance too large for 2^n enumeration.
class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleLimits {
  int ip_cap = 25;
  int census_cap = 20;
  // 0 = hardware concurrency. The result does not depend on it.
  int threads = 1;
  // Membership slack: x is good iff pareto(x) <= ip_gap + good_tol.
  double good_tol = 1e-9;
  LpOptions lp;
};

struct IpOptimum {
  double value = 0.0;
  BinaryVector solution;
};

// Maximum of <c,x> over 0/1 points with Ax <= b + 1e-9, by Gray-code
// enumeration. Ties keep the lexicographically first point.
IpOptimum IpOpt(const PackingInstance& inst, const OracleLimits& limits = {});

// LP=(Ax) - <c,x>.
double ParetoGap(const PackingInstance& inst, std::span<const std::uint8_t> x,
                 const LpOptions& options = {});

struct CensusReport {
  double ip_opt = 0.0;
  double lp_opt = 0.0;
  double ip_gap = 0.0;
  // Lexicographic order (x_1 most significant).
  std::vector<BinaryVector> good_points;
  std::vector<double> good_pareto;
  std::int64_t good_count = 0;
  double min_pareto = 0.0;  // over all of {0,1}^n
  std::uint64_t theorem_bound = 0;
  // Filled by AttachTree.
  std::int64_t observed_nodes = -1;
  bool bound_satisfied = false;
};

// C(n, <=k) = sum_{i <= k} C(n, i), saturating at UINT64_MAX.
std::uint64_t BinomialSum(int n, int k);

CensusReport GoodSet(const PackingInstance& inst,
                     const OracleLimits& limits = {});

// Records result.node_count and bound_satisfied = node_count <= bound.
void AttachTree(CensusReport& report, const BbResult& result);

CensusReport VerifyTreeBound(const PackingInstance& inst,
                             const BbResult& result,
                             const OracleLimits& limits = {});

// Every branched node's LP solution x^N lies in C_J(x) for some good x with
// J = frac(x^N), |J| <= m, and the nodes can be matched to distinct (x, J)
// pairs. Requires a tree solved with keep_lp_vectors.
bool VerifyBranchAssociation(const PackingInstance& inst,
                             const BbResult& result,
                             const CensusReport& census,
                             double integrality_tol = 1e-6);

nlohmann::json ToJson(const CensusReport& report, bool include_points = true);

}  // namespace packbb

#endif  // PACKBB_ORACLE_H_
