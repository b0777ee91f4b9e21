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

// Branch-and-bound with variable branching for 0/1 packing programs.
//
// Each iteration selects an open leaf, then:
//   * integral LP solution: prune by integrality, replacing the incumbent if
//     strictly better (the search starts with no incumbent);
//   * infeasible LP, or LP value <= incumbent + bound_tol: prune;
//   * otherwise branch on a fractional variable j, creating children with
//     x_j = 0 and x_j = 1 whose LPs are solved immediately.
// No cuts, presolve or primal heuristics.

#ifndef PACKBB_BB_H_
#define PACKBB_BB_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "packbb/instance.h"
#include "packbb/lp.h"
#include "packbb/rng.h"

namespace packbb {

using NodeId = std::int64_t;

enum class NodeStatus {
  kOpen,
  kBranched,
  kPrunedIntegrality,
  kPrunedInfeasible,
  kPrunedBound,
};

enum class NodeRule { kBestBound, kDepthFirst };

enum class VariableRuleKind {
  kFirst,
  kMostFractional,
  kRandom,
  kAdversarialReplay,
};

struct VariableRule {
  VariableRuleKind kind = VariableRuleKind::kFirst;
  std::uint64_t seed = 0;   // kRandom
  std::vector<int> script;  // kAdversarialReplay: one index per branching

  static VariableRule First() { return {}; }
  static VariableRule MostFractional() {
    return {VariableRuleKind::kMostFractional, 0, {}};
  }
  static VariableRule Random(std::uint64_t seed) {
    return {VariableRuleKind::kRandom, seed, {}};
  }
  static VariableRule Replay(std::vector<int> script) {
    return {VariableRuleKind::kAdversarialReplay, 0, std::move(script)};
  }
};

// Scripted variable is not fractional, or the script ran out.
class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view ToString(NodeStatus status);
std::string_view ToString(NodeRule rule);
std::string_view ToString(VariableRuleKind kind);
// Names: "best-bound", "depth-first"; "first", "most-fractional", "random",
// "adversarial-replay". Throw std::invalid_argument for unknown names.
NodeRule ParseNodeRule(std::string_view name);
VariableRuleKind ParseVariableRuleKind(std::string_view name);

struct BbNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  FixedSets fixed;
  // x, lambda and mu are dropped after processing unless
  // BbOptions::keep_lp_vectors is set.
  LpSolution lp;
  NodeStatus status = NodeStatus::kOpen;
  std::optional<int> branch_var;
  int depth = 0;
  std::vector<NodeId> children;  // {x_j = 0 child, x_j = 1 child}
};

struct PruneCounts {
  std::int64_t integrality = 0;
  std::int64_t infeasible = 0;
  std::int64_t bound = 0;
};

struct IncumbentUpdate {
  NodeId node = 0;
  double value = 0.0;
};

struct BbOptions {
  NodeRule node_rule = NodeRule::kBestBound;
  VariableRule var_rule;
  std::int64_t node_budget = 10'000'000;
  bool keep_lp_vectors = true;
  double bound_tol = 1e-9;
  LpOptions lp;
};

struct BbResult {
  // -inf and empty when no incumbent was found (only possible when the
  // budget ran out).
  double opt_value = 0.0;
  BinaryVector opt_solution;
  std::vector<BbNode> tree;  // indexed by node id
  std::int64_t node_count = 0;
  std::int64_t branched_count = 0;
  PruneCounts prune_counts;
  std::vector<IncumbentUpdate> incumbent_trace;
  // Branching variables in branching order; replaying this script with the
  // same node rule reproduces the tree.
  std::vector<int> branch_sequence;
  std::int64_t lp_solves = 0;
  double root_lp_value = 0.0;
  bool budget_exhausted = false;
  NodeRule node_rule = NodeRule::kBestBound;

  bool has_incumbent() const { return !opt_solution.empty(); }
};

// An open leaf as seen by the node selector.
struct OpenLeaf {
  NodeId id = 0;
  double lp_value = 0.0;
};

// True when `a` should be selected before `b`: higher LP value first, lower
// id on exact ties.
inline bool BetterLeaf(const OpenLeaf& a, const OpenLeaf& b) {
  if (a.lp_value != b.lp_value) return a.lp_value > b.lp_value;
  return a.id < b.id;
}

// Best-bound selection over a nonempty set of open leaves.
NodeId SelectNode(std::span<const OpenLeaf> open_leaves);

// Stateful variable selection: `random` owns its generator and
// `adversarial-replay` a cursor into its script.
class VariableSelector {
 public:
  explicit VariableSelector(VariableRule rule);

  // lp must have at least one fractional coordinate. Throws ScriptError for
  // an invalid replay script.
  int Select(const LpSolution& lp);

 private:
  VariableRule rule_;
  Xoshiro256 rng_;
  std::size_t cursor_ = 0;
};

// Throws LpNumericalError from the LP layer and ScriptError from the
// variable rule. A node budget overrun returns the partial tree with
// budget_exhausted set.
BbResult Solve(const PackingInstance& inst, const BbOptions& options = {});

// Branched nodes whose LP value is below opt_value - tol. Zero for every
// completed best-bound run.
std::int64_t CountBestBoundViolations(const BbResult& result,
                                      double tol = 1e-7);

// Structural checks over a recorded tree: root has no fixings, each child
// adds exactly the branching variable to J0 or J1, no variable is fixed
// twice, branched nodes have two children, node_count = 2 branched + 1,
// child LP value <= parent LP value + 1e-9, at most m fractional
// coordinates per LP. Returns one message per problem.
std::vector<std::string> CheckTreeIntegrity(const PackingInstance& inst,
                                            const BbResult& result);

// Tree dump: one node per line, "id parent status branch_var lp_value depth".
// Missing parent / branch_var are written as -1; an infeasible LP as -inf.
void WriteTreeDump(const BbResult& result, std::ostream& out);

struct TreeDumpRow {
  NodeId id = 0;
  NodeId parent = -1;
  NodeStatus status = NodeStatus::kOpen;
  int branch_var = -1;
  double lp_value = 0.0;
  int depth = 0;
};

std::vector<TreeDumpRow> ReadTreeDump(std::istream& in);

}  // namespace packbb

#endif  // PACKBB_BB_H_
