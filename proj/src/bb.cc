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

#include "packbb/bb.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <utility>

namespace packbb {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LeafKey(const BbNode& node) {
  return node.lp.optimal() ? node.lp.value : kNegInf;
}

// Open leaves under either node rule. Best-bound uses a max-heap keyed by
// (lp value, -id); depth-first is a stack that pops the x_j = 1 child first.
class OpenSet {
 public:
  explicit OpenSet(NodeRule rule) : rule_(rule) {}

  bool empty() const {
    return rule_ == NodeRule::kBestBound ? heap_.empty() : stack_.empty();
  }

  void Push(const OpenLeaf& leaf) {
    if (rule_ == NodeRule::kBestBound) {
      heap_.push(leaf);
    } else {
      stack_.push_back(leaf.id);
    }
  }

  NodeId Pop() {
    if (rule_ == NodeRule::kBestBound) {
      const NodeId id = heap_.top().id;
      heap_.pop();
      return id;
    }
    const NodeId id = stack_.back();
    stack_.pop_back();
    return id;
  }

 private:
  struct WorseFirst {
    bool operator()(const OpenLeaf& a, const OpenLeaf& b) const {
      return BetterLeaf(b, a);
    }
  };

  NodeRule rule_;
  std::priority_queue<OpenLeaf, std::vector<OpenLeaf>, WorseFirst> heap_;
  std::vector<NodeId> stack_;
};

void DropLpVectors(LpSolution& lp) {
  lp.x = {};
  lp.lambda = {};
  lp.mu = {};
}

}  // namespace

std::string_view ToString(NodeStatus status) {
  switch (status) {
    case NodeStatus::kOpen:
      return "open";
    case NodeStatus::kBranched:
      return "branched";
    case NodeStatus::kPrunedIntegrality:
      return "pruned_integrality";
    case NodeStatus::kPrunedInfeasible:
      return "pruned_infeasible";
    case NodeStatus::kPrunedBound:
      return "pruned_bound";
  }
  return "unknown";
}

std::string_view ToString(NodeRule rule) {
  return rule == NodeRule::kBestBound ? "best-bound" : "depth-first";
}

std::string_view ToString(VariableRuleKind kind) {
  switch (kind) {
    case VariableRuleKind::kFirst:
      return "first";
    case VariableRuleKind::kMostFractional:
      return "most-fractional";
    case VariableRuleKind::kRandom:
      return "random";
    case VariableRuleKind::kAdversarialReplay:
      return "adversarial-replay";
  }
  return "unknown";
}

NodeRule ParseNodeRule(std::string_view name) {
  if (name == "best-bound") return NodeRule::kBestBound;
  if (name == "depth-first") return NodeRule::kDepthFirst;
  throw std::invalid_argument("unknown node rule '" + std::string(name) + "'");
}

VariableRuleKind ParseVariableRuleKind(std::string_view name) {
  for (auto kind : {VariableRuleKind::kFirst, VariableRuleKind::kMostFractional,
                    VariableRuleKind::kRandom,
                    VariableRuleKind::kAdversarialReplay}) {
    if (name == ToString(kind)) return kind;
  }
  throw std::invalid_argument("unknown variable rule '" + std::string(name) +
                              "'");
}

NodeId SelectNode(std::span<const OpenLeaf> open_leaves) {
  if (open_leaves.empty()) {
    throw std::invalid_argument("SelectNode needs at least one open leaf");
  }
  return std::min_element(open_leaves.begin(), open_leaves.end(), BetterLeaf)
      ->id;
}

VariableSelector::VariableSelector(VariableRule rule)
    : rule_(std::move(rule)), rng_(rule_.seed, 7) {}

int VariableSelector::Select(const LpSolution& lp) {
  const auto& frac = lp.fractional;
  if (frac.empty()) {
    throw std::invalid_argument("no fractional variable to branch on");
  }
  switch (rule_.kind) {
    case VariableRuleKind::kFirst:
      return frac.front();
    case VariableRuleKind::kMostFractional: {
      int best = frac.front();
      double best_dist = std::abs(lp.x[best] - 0.5);
      for (int j : frac) {
        const double dist = std::abs(lp.x[j] - 0.5);
        if (dist < best_dist) {
          best = j;
          best_dist = dist;
        }
      }
      return best;
    }
    case VariableRuleKind::kRandom:
      return frac[rng_.Below(frac.size())];
    case VariableRuleKind::kAdversarialReplay: {
      if (cursor_ >= rule_.script.size()) {
        throw ScriptError("replay script exhausted after " +
                          std::to_string(cursor_) + " branchings");
      }
      const int j = rule_.script[cursor_++];
      if (!std::binary_search(frac.begin(), frac.end(), j)) {
        throw ScriptError("scripted variable " + std::to_string(j) +
                          " is not fractional at branching " +
                          std::to_string(cursor_));
      }
      return j;
    }
  }
  return frac.front();
}

BbResult Solve(const PackingInstance& inst, const BbOptions& options) {
  BbResult result;
  result.node_rule = options.node_rule;
  result.opt_value = kNegInf;
  VariableSelector selector(options.var_rule);
  OpenSet open(options.node_rule);

  const auto create = [&](std::optional<NodeId> parent, FixedSets fixed,
                          int depth) {
    BbNode node;
    node.id = static_cast<NodeId>(result.tree.size());
    node.parent = parent;
    node.depth = depth;
    node.lp = SolveLp(inst, fixed, options.lp);
    node.fixed = std::move(fixed);
    ++result.lp_solves;
    open.Push({node.id, LeafKey(node)});
    result.tree.push_back(std::move(node));
    return result.tree.back().id;
  };

  create(std::nullopt, FixedSets{}, 0);
  result.root_lp_value = result.tree[0].lp.value;

  while (!open.empty()) {
    const NodeId id = open.Pop();
    BbNode& node = result.tree[id];
    if (!node.lp.optimal()) {
      node.status = NodeStatus::kPrunedInfeasible;
      ++result.prune_counts.infeasible;
    } else if (node.lp.integral()) {
      BinaryVector rounded(inst.n());
      for (int j = 0; j < inst.n(); ++j) rounded[j] = node.lp.x[j] > 0.5;
      const double value = inst.Value(rounded);
      if (!result.has_incumbent() || value > result.opt_value) {
        result.opt_value = value;
        result.opt_solution = std::move(rounded);
        result.incumbent_trace.push_back({id, value});
      }
      node.status = NodeStatus::kPrunedIntegrality;
      ++result.prune_counts.integrality;
    } else if (result.has_incumbent() &&
               node.lp.value <= result.opt_value + options.bound_tol) {
      node.status = NodeStatus::kPrunedBound;
      ++result.prune_counts.bound;
    } else {
      if (static_cast<std::int64_t>(result.tree.size()) + 2 >
          options.node_budget) {
        result.budget_exhausted = true;
        break;
      }
      const int j = selector.Select(node.lp);
      node.status = NodeStatus::kBranched;
      node.branch_var = j;
      ++result.branched_count;
      result.branch_sequence.push_back(j);
      FixedSets left = node.fixed;
      FixedSets right = node.fixed;
      left.zero.push_back(j);
      right.one.push_back(j);
      const int depth = node.depth + 1;
      if (!options.keep_lp_vectors) DropLpVectors(node.lp);
      // `node` may dangle after create() grows the tree.
      const NodeId l = create(id, std::move(left), depth);
      const NodeId r = create(id, std::move(right), depth);
      result.tree[id].children = {l, r};
      continue;
    }
    if (!options.keep_lp_vectors) DropLpVectors(node.lp);
  }
  result.node_count = static_cast<std::int64_t>(result.tree.size());
  return result;
}

std::int64_t CountBestBoundViolations(const BbResult& result, double tol) {
  if (!result.has_incumbent()) return 0;
  std::int64_t violations = 0;
  for (const auto& node : result.tree) {
    if (node.status == NodeStatus::kBranched &&
        node.lp.value < result.opt_value - tol) {
      ++violations;
    }
  }
  return violations;
}

std::vector<std::string> CheckTreeIntegrity(const PackingInstance& inst,
                                            const BbResult& result) {
  std::vector<std::string> problems;
  const auto complain = [&problems](NodeId id, const std::string& what) {
    problems.push_back("node " + std::to_string(id) + ": " + what);
  };
  if (result.tree.empty()) {
    problems.push_back("empty tree");
    return problems;
  }
  if (!result.tree[0].fixed.empty()) complain(0, "root has fixings");
  if (result.node_count != 2 * result.branched_count + 1) {
    problems.push_back("node_count != 2 * branched_count + 1");
  }
  if (result.lp_solves != result.node_count) {
    problems.push_back("LP solve count differs from node count");
  }
  for (const auto& node : result.tree) {
    if (node.lp.optimal() &&
        static_cast<int>(node.lp.fractional.size()) > inst.m()) {
      complain(node.id, "more than m fractional coordinates");
    }
    if (!node.fixed.ValidFor(inst.n())) {
      complain(node.id, "variable fixed twice or out of range");
    }
    const bool branched = node.status == NodeStatus::kBranched;
    if (branched != node.branch_var.has_value() ||
        branched != (node.children.size() == 2)) {
      complain(node.id, "branched status, branch_var and children disagree");
      continue;
    }
    if (!branched) continue;
    const int j = *node.branch_var;
    for (std::size_t side = 0; side < 2; ++side) {
      const BbNode& child = result.tree.at(node.children[side]);
      if (child.parent != node.id) complain(child.id, "wrong parent");
      if (child.depth != node.depth + 1) complain(child.id, "wrong depth");
      FixedSets expected = node.fixed;
      (side == 0 ? expected.zero : expected.one).push_back(j);
      if (child.fixed.zero != expected.zero || child.fixed.one != expected.one) {
        complain(child.id, "fixings are not parent's plus the branch variable");
      }
      if (child.lp.optimal() && child.lp.value > node.lp.value + 1e-9) {
        complain(child.id, "LP value exceeds parent's");
      }
    }
  }
  return problems;
}

void WriteTreeDump(const BbResult& result, std::ostream& out) {
  for (const auto& node : result.tree) {
    out << node.id << ' ' << (node.parent ? *node.parent : -1) << ' '
        << ToString(node.status) << ' '
        << (node.branch_var ? *node.branch_var : -1) << ' '
        << (node.lp.optimal() ? FormatDouble(node.lp.value) : "-inf") << ' '
        << node.depth << '\n';
  }
}

std::vector<TreeDumpRow> ReadTreeDump(std::istream& in) {
  std::vector<TreeDumpRow> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    TreeDumpRow row;
    std::string status;
    std::string value;
    if (!(fields >> row.id >> row.parent >> status >> row.branch_var >> value >>
          row.depth)) {
      throw ParseError(number, "expected 'id parent status branch_var "
                               "lp_value depth'");
    }
    bool known = false;
    for (auto s : {NodeStatus::kOpen, NodeStatus::kBranched,
                   NodeStatus::kPrunedIntegrality,
                   NodeStatus::kPrunedInfeasible, NodeStatus::kPrunedBound}) {
      if (status == ToString(s)) {
        row.status = s;
        known = true;
      }
    }
    if (!known) throw ParseError(number, "status: unknown '" + status + "'");
    row.lp_value = value == "-inf" ? kNegInf : std::stod(value);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace packbb
