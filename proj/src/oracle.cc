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

#include "packbb/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_set>
#include <utility>

#include "parallel.h"

namespace packbb {
namespace {

using Mask = std::uint64_t;

// Lexicographic index: coordinate j is bit n-1-j, so x_1 is the most
// significant bit.
Mask IndexOf(std::span<const std::uint8_t> x) {
  const int n = static_cast<int>(x.size());
  Mask idx = 0;
  for (int j = 0; j < n; ++j) {
    if (x[j]) idx |= Mask{1} << (n - 1 - j);
  }
  return idx;
}

BinaryVector PointOf(Mask idx, int n) {
  BinaryVector x(n);
  for (int j = 0; j < n; ++j) x[j] = (idx >> (n - 1 - j)) & 1;
  return x;
}

// Gray-code walk over the low `free_bits` coordinates (the last free_bits
// coordinates of x) with the higher ones fixed by `prefix`. visit(idx, ax,
// value) is called once per point with Ax and <c,x> maintained
// incrementally.
template <typename Visit>
void GrayWalk(const PackingInstance& inst, Mask prefix, int free_bits,
              Visit&& visit) {
  const int n = inst.n();
  const int m = inst.m();
  std::vector<double> ax(m, 0.0);
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    if ((prefix >> (n - 1 - j)) & 1) {
      const auto col = inst.column(j);
      for (int i = 0; i < m; ++i) ax[i] += col[i];
      value += inst.c()[j];
    }
  }
  Mask idx = prefix;
  visit(idx, ax, value);
  const Mask count = Mask{1} << free_bits;
  for (Mask k = 1; k < count; ++k) {
    const int bit = std::countr_zero(k);
    const int j = n - 1 - bit;
    const double sign = ((idx >> bit) & 1) ? -1.0 : 1.0;
    idx ^= Mask{1} << bit;
    const auto col = inst.column(j);
    for (int i = 0; i < m; ++i) ax[i] += sign * col[i];
    value += sign * inst.c()[j];
    visit(idx, ax, value);
  }
}

}  // namespace

IpOptimum IpOpt(const PackingInstance& inst, const OracleLimits& limits) {
  const int n = inst.n();
  if (n > limits.ip_cap) {
    throw OracleCapError("ip_opt enumeration refused: n = " +
                         std::to_string(n) + " exceeds cap " +
                         std::to_string(limits.ip_cap));
  }
  const auto b = inst.b();
  Mask best_idx = 0;
  double best_value = 0.0;  // x = 0 is always feasible
  GrayWalk(inst, 0, n, [&](Mask idx, const std::vector<double>& ax,
                           double value) {
    if (value < best_value - 1e-9) return;
    for (int i = 0; i < inst.m(); ++i) {
      if (ax[i] > b[i] + 1e-9) return;
    }
    // Re-evaluate exactly before comparing.
    const BinaryVector x = PointOf(idx, n);
    if (!inst.Feasible(x)) return;
    const double exact = inst.Value(x);
    if (exact > best_value || (exact == best_value && idx < best_idx)) {
      best_value = exact;
      best_idx = idx;
    }
  });
  return {best_value, PointOf(best_idx, n)};
}

double ParetoGap(const PackingInstance& inst, std::span<const std::uint8_t> x,
                 const LpOptions& options) {
  const auto ax = inst.Occupation(x);
  const auto slice = SolveEqLp(inst, ax, options);
  if (!slice.optimal()) {
    throw LpNumericalError("slice LP containing x reported infeasible");
  }
  return slice.value - inst.Value(x);
}

std::uint64_t BinomialSum(int n, int k) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 term = 1;
  unsigned __int128 sum = 0;
  for (int i = 0; i <= std::min(n, k); ++i) {
    if (i > 0) term = term * static_cast<unsigned>(n - i + 1) / static_cast<unsigned>(i);
    sum += term;
    if (sum >= kMax) return kMax;
  }
  return static_cast<std::uint64_t>(sum);
}

CensusReport GoodSet(const PackingInstance& inst, const OracleLimits& limits) {
  const int n = inst.n();
  if (n > limits.census_cap) {
    throw OracleCapError("census refused: n = " + std::to_string(n) +
                         " exceeds cap " + std::to_string(limits.census_cap));
  }
  CensusReport report;
  OracleLimits ip_limits = limits;
  ip_limits.ip_cap = std::max(limits.ip_cap, n);
  report.ip_opt = IpOpt(inst, ip_limits).value;
  report.lp_opt = LpValue(inst);
  report.ip_gap = std::max(0.0, report.lp_opt - report.ip_opt);

  const int prefix_bits = std::min(n, 6);
  const int free_bits = n - prefix_bits;
  std::vector<double> pareto(std::size_t{1} << n);
  const auto block_body = [&](int block) {
    std::vector<double> rhs(inst.m());
    GrayWalk(inst, static_cast<Mask>(block) << free_bits, free_bits,
             [&](Mask idx, const std::vector<double>& ax, double value) {
               for (int i = 0; i < inst.m(); ++i) rhs[i] = std::max(0.0, ax[i]);
               const auto slice = SolveEqLp(inst, rhs, limits.lp);
               if (!slice.optimal()) {
                 throw LpNumericalError(
                     "slice LP containing x reported infeasible");
               }
               pareto[idx] = slice.value - value;
             });
  };
  internal::ParallelFor(1 << prefix_bits,
                        internal::ResolveThreads(limits.threads), block_body);

  report.min_pareto = std::numeric_limits<double>::infinity();
  const double threshold = report.ip_gap + limits.good_tol;
  for (Mask idx = 0; idx < pareto.size(); ++idx) {
    report.min_pareto = std::min(report.min_pareto, pareto[idx]);
    if (pareto[idx] <= threshold) {
      report.good_points.push_back(PointOf(idx, n));
      report.good_pareto.push_back(pareto[idx]);
    }
  }
  report.good_count = static_cast<std::int64_t>(report.good_points.size());
  const std::uint64_t binom = BinomialSum(n, inst.m());
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const unsigned __int128 bound =
      static_cast<unsigned __int128>(2) * report.good_count * binom + 1;
  report.theorem_bound =
      bound >= kMax ? kMax : static_cast<std::uint64_t>(bound);
  return report;
}

void AttachTree(CensusReport& report, const BbResult& result) {
  report.observed_nodes = result.node_count;
  report.bound_satisfied =
      static_cast<std::uint64_t>(result.node_count) <= report.theorem_bound;
}

CensusReport VerifyTreeBound(const PackingInstance& inst,
                             const BbResult& result,
                             const OracleLimits& limits) {
  CensusReport report = GoodSet(inst, limits);
  AttachTree(report, result);
  return report;
}

bool VerifyBranchAssociation(const PackingInstance& inst,
                             const BbResult& result,
                             const CensusReport& census,
                             double integrality_tol) {
  const int n = inst.n();
  std::unordered_set<Mask> good;
  for (const auto& x : census.good_points) good.insert(IndexOf(x));

  // Candidate (x, J) pairs per branched node, as dense pair ids.
  std::map<std::pair<Mask, Mask>, int> pair_ids;
  std::vector<std::vector<int>> candidates;
  for (const auto& node : result.tree) {
    if (node.status != NodeStatus::kBranched) continue;
    if (static_cast<int>(node.lp.x.size()) != n) {
      throw std::invalid_argument(
          "branch association needs LP vectors (keep_lp_vectors)");
    }
    Mask base = 0;
    Mask jmask = 0;
    std::vector<int> bits;
    for (int j = 0; j < n; ++j) {
      const double v = node.lp.x[j];
      const int bit = n - 1 - j;
      if (IsFractional(v, integrality_tol)) {
        jmask |= Mask{1} << bit;
        bits.push_back(bit);
      } else if (v > 0.5) {
        base |= Mask{1} << bit;
      }
    }
    if (static_cast<int>(bits.size()) > inst.m()) return false;
    std::vector<int> options;
    for (Mask s = 0; s < (Mask{1} << bits.size()); ++s) {
      Mask idx = base;
      for (std::size_t t = 0; t < bits.size(); ++t) {
        if ((s >> t) & 1) idx |= Mask{1} << bits[t];
      }
      if (!good.contains(idx)) continue;
      const auto key = std::make_pair(idx, jmask);
      auto it = pair_ids.find(key);
      if (it == pair_ids.end()) {
        it = pair_ids.emplace(key, static_cast<int>(pair_ids.size())).first;
      }
      options.push_back(it->second);
    }
    if (options.empty()) return false;
    candidates.push_back(std::move(options));
  }

  // Kuhn's augmenting paths; every node must be matched.
  std::vector<int> owner(pair_ids.size(), -1);
  std::vector<char> visited;
  const auto augment = [&](auto&& self, int node) -> bool {
    for (int p : candidates[node]) {
      if (visited[p]) continue;
      visited[p] = 1;
      if (owner[p] < 0 || self(self, owner[p])) {
        owner[p] = node;
        return true;
      }
    }
    return false;
  };
  for (int node = 0; node < static_cast<int>(candidates.size()); ++node) {
    visited.assign(pair_ids.size(), 0);
    if (!augment(augment, node)) return false;
  }
  return true;
}

nlohmann::json ToJson(const CensusReport& report, bool include_points) {
  nlohmann::json j;
  j["ip_opt"] = report.ip_opt;
  j["lp_opt"] = report.lp_opt;
  j["ip_gap"] = report.ip_gap;
  j["good_count"] = report.good_count;
  j["min_pareto"] = report.min_pareto;
  j["theorem_bound"] = report.theorem_bound;
  if (report.observed_nodes >= 0) {
    j["observed_nodes"] = report.observed_nodes;
    j["bound_satisfied"] = report.bound_satisfied;
  } else {
    j["observed_nodes"] = nullptr;
    j["bound_satisfied"] = nullptr;
  }
  if (include_points) {
    auto points = nlohmann::json::array();
    for (std::size_t k = 0; k < report.good_points.size(); ++k) {
      std::string bits;
      for (auto v : report.good_points[k]) bits.push_back(v ? '1' : '0');
      points.push_back({{"x", bits}, {"pareto", report.good_pareto[k]}});
    }
    j["good_points"] = std::move(points);
  }
  return j;
}

}  // namespace packbb
