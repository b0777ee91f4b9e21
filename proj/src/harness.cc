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


#include "packbb/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "packbb/geometry.h"
#include "packbb/instance.h"
#include "packbb/oracle.h"
#include "packbb/rng.h"
#include "parallel.h"

namespace packbb {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) items.push_back(Trim(item));
  return items;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("field '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(const std::string& key, const std::string& text) {
  std::vector<T> values;
  for (const auto& item : SplitList(text)) {
    values.push_back(ParseNumber<T>(key, item));
  }
  if (values.empty()) throw ConfigError("field '" + key + "': empty list");
  return values;
}

template <typename T>
std::string JoinList(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += FormatDouble(values[k]);
    } else {
      out += std::to_string(values[k]);
    }
  }
  return out;
}

std::string Cell(double v) {
  if (std::isnan(v)) return "nan";
  return FormatDouble(v);
}
std::string Cell(std::int64_t v) { return std::to_string(v); }
std::string Cell(std::uint64_t v) { return std::to_string(v); }
std::string Cell(int v) { return std::to_string(v); }
std::string Cell(bool v) { return v ? "true" : "false"; }

std::vector<double> RowBeta(const ExperimentConfig& config) {
  if (config.beta.size() == 1) {
    return std::vector<double>(config.m, config.beta[0]);
  }
  return config.beta;
}

double GapScaled(double gap, int n) {
  const double l = std::log(static_cast<double>(n));
  return gap * n / (l * l);
}

// Random-rule trees for `trials` seeds; the branch sequence of the largest
// tree (first on ties) is then replayed.
struct ReplayOutcome {
  BbResult result;
  bool reproduced = true;
};

ReplayOutcome AdversarialReplay(const PackingInstance& inst,
                                BbOptions options, int trials,
                                std::uint64_t seed) {
  const bool keep = options.keep_lp_vectors;
  options.keep_lp_vectors = false;
  std::vector<int> worst;
  std::int64_t worst_nodes = -1;
  for (int t = 0; t < trials; ++t) {
    options.var_rule = VariableRule::Random(seed ^ Mix64(t + 1));
    const auto trial = Solve(inst, options);
    if (trial.node_count > worst_nodes) {
      worst_nodes = trial.node_count;
      worst = trial.branch_sequence;
    }
  }
  options.keep_lp_vectors = keep;
  options.var_rule = VariableRule::Replay(std::move(worst));
  ReplayOutcome out;
  out.result = Solve(inst, options);
  out.reproduced = out.result.node_count == worst_nodes;
  return out;
}

BbOptions MakeBbOptions(const ExperimentConfig& config, std::uint64_t seed) {
  BbOptions options;
  options.node_rule = config.node_rule;
  options.node_budget = config.node_budget;
  options.keep_lp_vectors = false;
  switch (config.var_rule) {
    case VariableRuleKind::kFirst:
      options.var_rule = VariableRule::First();
      break;
    case VariableRuleKind::kMostFractional:
      options.var_rule = VariableRule::MostFractional();
      break;
    case VariableRuleKind::kRandom:
    case VariableRuleKind::kAdversarialReplay:
      options.var_rule = VariableRule::Random(seed);
      break;
  }
  return options;
}

BbResult SolveWithRule(const ExperimentConfig& config,
                       const PackingInstance& inst, std::uint64_t seed,
                       bool keep_lp_vectors, std::vector<std::string>& failures,
                       const std::string& where) {
  BbOptions options = MakeBbOptions(config, seed);
  options.keep_lp_vectors = keep_lp_vectors;
  if (config.var_rule != VariableRuleKind::kAdversarialReplay) {
    return Solve(inst, options);
  }
  auto outcome = AdversarialReplay(inst, options, config.script_trials, seed);
  if (!outcome.reproduced) {
    failures.push_back(where + ": replayed script did not reproduce its tree");
  }
  return std::move(outcome.result);
}

struct TaskOutput {
  std::vector<std::string> cells;
  std::vector<std::string> failures;
  double seconds = 0.0;
  std::map<std::string, double> stats;
};

struct Task {
  int n = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  std::string where;
};

std::vector<std::string> ColumnsFor(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSolve:
    case ExperimentKind::kScaling:
      return {"n",          "replica",        "seed",
              "var_rule",   "node_count",     "branched_count",
              "opt_value",  "root_lp_value",  "ip_gap",
              "gap_scaled", "max_fractional", "best_bound_violations",
              "budget_exhausted"};
    case ExperimentKind::kCensus:
      return {"n",           "replica",         "seed",        "var_rule",
              "node_count",  "good_count",      "theorem_bound",
              "bound_satisfied", "association", "ip_opt",      "lp_opt",
              "ip_gap",      "min_pareto"};
    case ExperimentKind::kSlabs:
      return {"n", "replica", "seed", "slabs", "violations", "max_ratio"};
    case ExperimentKind::kArrangement:
      return {"n",          "replica",       "seed",   "exact_cells",
              "cell_bound", "sampled_cells", "missing"};
  }
  return {};
}

TaskOutput RunSolveTask(const ExperimentConfig& config, const Task& task) {
  TaskOutput out;
  const auto inst = Generate(config.m, task.n, RowBeta(config), task.seed);
  const auto result = SolveWithRule(config, inst, task.seed, false,
                                    out.failures, task.where);
  int max_fractional = 0;
  for (const auto& node : result.tree) {
    max_fractional =
        std::max(max_fractional, static_cast<int>(node.lp.fractional.size()));
  }
  const bool complete = !result.budget_exhausted;
  const double gap = complete ? result.root_lp_value - result.opt_value
                              : std::numeric_limits<double>::quiet_NaN();
  const std::int64_t violations =
      complete && config.node_rule == NodeRule::kBestBound
          ? CountBestBoundViolations(result)
          : 0;
  if (violations > 0) {
    out.failures.push_back(task.where + ": best-bound lemma violated at " +
                           std::to_string(violations) + " nodes");
  }
  if (max_fractional > config.m) {
    out.failures.push_back(task.where +
                           ": an LP vertex has more than m fractional entries");
  }
  out.cells = {Cell(task.n),
               Cell(task.replica),
               Cell(task.seed),
               std::string(ToString(config.var_rule)),
               Cell(result.node_count),
               Cell(result.branched_count),
               Cell(complete ? result.opt_value
                             : std::numeric_limits<double>::quiet_NaN()),
               Cell(result.root_lp_value),
               Cell(gap),
               Cell(GapScaled(gap, task.n)),
               Cell(max_fractional),
               Cell(violations),
               Cell(result.budget_exhausted)};
  out.stats["node_count"] = static_cast<double>(result.node_count);
  out.stats["gap_scaled"] = GapScaled(gap, task.n);
  out.stats["budget_exhausted"] = result.budget_exhausted;
  return out;
}

TaskOutput RunCensusTask(const ExperimentConfig& config, const Task& task) {
  TaskOutput out;
  const auto inst = Generate(config.m, task.n, RowBeta(config), task.seed);
  OracleLimits limits;
  limits.ip_cap = config.ip_cap;
  limits.census_cap = config.census_cap;
  auto report = GoodSet(inst, limits);
  const auto result =
      SolveWithRule(config, inst, task.seed, true, out.failures, task.where);
  AttachTree(report, result);
  bool association = false;
  if (result.budget_exhausted) {
    out.failures.push_back(task.where + ": node budget exhausted");
  } else {
    association = VerifyBranchAssociation(inst, result, report);
  }
  if (!report.bound_satisfied) {
    out.failures.push_back(task.where + ": tree has " +
                           std::to_string(result.node_count) +
                           " nodes, above the bound " +
                           std::to_string(report.theorem_bound));
  }
  if (!association && !result.budget_exhausted) {
    out.failures.push_back(task.where +
                           ": branched nodes admit no injective good-point "
                           "association");
  }
  out.cells = {Cell(task.n),
               Cell(task.replica),
               Cell(task.seed),
               std::string(ToString(config.var_rule)),
               Cell(result.node_count),
               Cell(report.good_count),
               Cell(report.theorem_bound),
               Cell(report.bound_satisfied),
               Cell(association),
               Cell(report.ip_opt),
               Cell(report.lp_opt),
               Cell(report.ip_gap),
               Cell(report.min_pareto)};
  out.stats["bound_satisfied"] = report.bound_satisfied;
  out.stats["association"] = association;
  out.stats["ratio"] = static_cast<double>(result.node_count) /
                       static_cast<double>(report.theorem_bound);
  return out;
}

// Unit normal of H(lambda) = {y : y_0 - <lambda, y_rest> = 0}.
std::vector<double> HyperplaneNormal(std::span<const double> lambda) {
  std::vector<double> u{1.0};
  double norm2 = 1.0;
  for (double l : lambda) {
    u.push_back(-l);
    norm2 += l * l;
  }
  for (auto& v : u) v /= std::sqrt(norm2);
  return u;
}

TaskOutput RunSlabsTask(const ExperimentConfig& config, const Task& task) {
  TaskOutput out;
  const auto inst = Generate(config.m, task.n, RowBeta(config), task.seed);
  const auto points = ItemPoints(inst);
  const auto root = SolveLp(inst, {});
  // Even directions are normals of H(lambda) around the root dual, where
  // the item points crowd; odd ones are uniform.
  Xoshiro256 rng(task.seed, 6);
  const double unit = std::log(static_cast<double>(task.n)) / task.n;
  std::int64_t slabs = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  for (int d = 0; d < config.slab_directions; ++d) {
    std::vector<double> u;
    if (d % 2 == 0) {
      std::vector<double> lambda = root.lambda;
      for (auto& l : lambda) l *= rng.Uniform(0.5, 1.5);
      u = HyperplaneNormal(lambda);
    } else {
      u = RandomDirection(config.m + 1, task.seed ^ Mix64(d));
    }
    for (int i : config.slab_widths) {
      const auto report = SlabCount(points, u, std::ldexp(unit, i));
      ++slabs;
      if (!report.within_bound) ++violations;
      max_ratio = std::max(max_ratio, report.count / report.bound);
    }
  }
  out.cells = {Cell(task.n), Cell(task.replica), Cell(task.seed),
               Cell(slabs),  Cell(violations),   Cell(max_ratio)};
  out.stats["violated"] = violations > 0;
  out.stats["max_ratio"] = max_ratio;
  return out;
}

TaskOutput RunArrangementTask(const ExperimentConfig& config,
                              const Task& task) {
  TaskOutput out;
  const auto inst = Generate(config.m, task.n, RowBeta(config), task.seed);
  const auto cells = EnumerateCells1d(inst);
  std::set<std::vector<Assign>> exact;
  for (const auto& c : cells) exact.insert(c.assignment);
  const auto sampled =
      SampleCells(inst, config.arrangement_samples, task.seed);
  std::int64_t missing = 0;
  for (const auto& s : sampled) missing += !exact.contains(s.assignment);
  const std::int64_t bound = 2 * static_cast<std::int64_t>(task.n) + 1;
  const auto count = static_cast<std::int64_t>(exact.size());
  if (count > bound) {
    out.failures.push_back(task.where + ": " + std::to_string(count) +
                           " cells exceed 2n+1");
  }
  if (missing > 0) {
    out.failures.push_back(task.where + ": " + std::to_string(missing) +
                           " sampled cells missing from the exact list");
  }
  out.cells = {Cell(task.n),        Cell(task.replica), Cell(task.seed),
               Cell(count),         Cell(bound),
               Cell(static_cast<std::int64_t>(sampled.size())),
               Cell(missing)};
  out.stats["cells_ratio"] = static_cast<double>(count) / bound;
  out.stats["missing"] = static_cast<double>(missing);
  return out;
}

nlohmann::json Aggregate(const ExperimentConfig& config,
                         const std::vector<Task>& tasks,
                         const std::vector<TaskOutput>& outputs) {
  nlohmann::json agg;
  agg["kind"] = ToString(config.kind);
  agg["rows"] = outputs.size();
  const auto stat = [&](std::size_t k, const char* key) {
    return outputs[k].stats.at(key);
  };
  switch (config.kind) {
    case ExperimentKind::kSolve:
    case ExperimentKind::kScaling: {
      auto per_n = nlohmann::json::array();
      std::vector<double> log_n;
      std::vector<double> log_nodes;
      std::vector<double> gap_medians;
      for (int n : config.n_list) {
        std::vector<double> nodes;
        std::vector<double> gaps;
        int exhausted = 0;
        for (std::size_t k = 0; k < tasks.size(); ++k) {
          if (tasks[k].n != n) continue;
          nodes.push_back(stat(k, "node_count"));
          if (stat(k, "budget_exhausted") != 0.0) {
            ++exhausted;
          } else {
            gaps.push_back(stat(k, "gap_scaled"));
          }
        }
        const double med_nodes = Median(nodes);
        const double med_gap =
            gaps.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : Median(gaps);
        per_n.push_back({{"n", n},
                         {"median_node_count", med_nodes},
                         {"max_node_count",
                          *std::max_element(nodes.begin(), nodes.end())},
                         {"median_gap_scaled", med_gap},
                         {"budget_exhausted", exhausted}});
        log_n.push_back(std::log(static_cast<double>(n)));
        log_nodes.push_back(std::log(med_nodes));
        gap_medians.push_back(med_gap);
      }
      agg["per_n"] = std::move(per_n);
      std::set<int> distinct(config.n_list.begin(), config.n_list.end());
      if (distinct.size() >= 2) {
        agg["loglog_slope"] = LeastSquaresSlope(log_n, log_nodes);
        const auto [lo, hi] =
            std::minmax_element(gap_medians.begin(), gap_medians.end());
        if (*lo > 0.0) {
          agg["gap_scaled_ratio"] = *hi / *lo;
        } else {
          agg["gap_scaled_ratio"] = nullptr;
        }
      } else {
        agg["loglog_slope"] = nullptr;
        agg["gap_scaled_ratio"] = nullptr;
      }
      break;
    }
    case ExperimentKind::kCensus: {
      std::int64_t unsatisfied = 0;
      std::int64_t unassociated = 0;
      double max_ratio = 0.0;
      for (std::size_t k = 0; k < outputs.size(); ++k) {
        unsatisfied += stat(k, "bound_satisfied") == 0.0;
        unassociated += stat(k, "association") == 0.0;
        max_ratio = std::max(max_ratio, stat(k, "ratio"));
      }
      agg["bound_violations"] = unsatisfied;
      agg["association_failures"] = unassociated;
      agg["max_nodes_over_bound"] = max_ratio;
      break;
    }
    case ExperimentKind::kSlabs: {
      std::int64_t violated = 0;
      double max_ratio = 0.0;
      for (std::size_t k = 0; k < outputs.size(); ++k) {
        violated += stat(k, "violated") != 0.0;
        max_ratio = std::max(max_ratio, stat(k, "max_ratio"));
      }
      agg["instances_with_violation"] = violated;
      agg["violation_fraction"] =
          outputs.empty() ? 0.0
                          : static_cast<double>(violated) / outputs.size();
      agg["max_count_over_bound"] = max_ratio;
      break;
    }
    case ExperimentKind::kArrangement: {
      double max_ratio = 0.0;
      double missing = 0.0;
      for (std::size_t k = 0; k < outputs.size(); ++k) {
        max_ratio = std::max(max_ratio, stat(k, "cells_ratio"));
        missing += stat(k, "missing");
      }
      agg["max_cells_over_bound"] = max_ratio;
      agg["missing_samples"] = missing;
      break;
    }
  }
  return agg;
}

}  // namespace

std::string_view ToString(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSolve:
      return "solve";
    case ExperimentKind::kCensus:
      return "census";
    case ExperimentKind::kScaling:
      return "scaling";
    case ExperimentKind::kSlabs:
      return "slabs";
    case ExperimentKind::kArrangement:
      return "arrangement";
  }
  return "unknown";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  for (auto kind : {ExperimentKind::kSolve, ExperimentKind::kCensus,
                    ExperimentKind::kScaling, ExperimentKind::kSlabs,
                    ExperimentKind::kArrangement}) {
    if (name == ToString(kind)) return kind;
  }
  throw ConfigError("field 'kind': unknown experiment '" + std::string(name) +
                    "'");
}

ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int number = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) +
                        ": expected key=value");
    }
    const std::string key = Trim(std::string_view(text).substr(0, eq));
    const std::string value = Trim(std::string_view(text).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("field '" + key + "': given twice");
    }
    try {
      if (key == "kind") {
        config.kind = ParseExperimentKind(value);
      } else if (key == "m") {
        config.m = ParseNumber<int>(key, value);
      } else if (key == "beta") {
        config.beta = ParseList<double>(key, value);
      } else if (key == "n_list") {
        config.n_list = ParseList<int>(key, value);
      } else if (key == "replicas") {
        config.replicas = ParseNumber<int>(key, value);
      } else if (key == "base_seed") {
        config.base_seed = ParseNumber<std::uint64_t>(key, value);
      } else if (key == "var_rule") {
        config.var_rule = ParseVariableRuleKind(value);
      } else if (key == "node_rule") {
        config.node_rule = ParseNodeRule(value);
      } else if (key == "node_budget") {
        config.node_budget = ParseNumber<std::int64_t>(key, value);
      } else if (key == "ip_cap") {
        config.ip_cap = ParseNumber<int>(key, value);
      } else if (key == "census_cap") {
        config.census_cap = ParseNumber<int>(key, value);
      } else if (key == "threads") {
        config.threads = ParseNumber<int>(key, value);
      } else if (key == "script_trials") {
        config.script_trials = ParseNumber<int>(key, value);
      } else if (key == "slab_directions") {
        config.slab_directions = ParseNumber<int>(key, value);
      } else if (key == "slab_widths") {
        config.slab_widths = ParseList<int>(key, value);
      } else if (key == "arrangement_samples") {
        config.arrangement_samples = ParseNumber<int>(key, value);
      } else if (key == "rows_out") {
        config.rows_out = value;
      } else if (key == "aggregate_out") {
        config.aggregate_out = value;
      } else if (key == "timing_out") {
        config.timing_out = value;
      } else {
        throw ConfigError("line " + std::to_string(number) +
                          ": unknown field '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field '" + key + "': " + e.what());
    }
  }
  Validate(config);
  return config;
}

ExperimentConfig ParseConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return ParseConfig(in);
}

void Validate(const ExperimentConfig& config) {
  const auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError("field '" + key + "': " + what);
  };
  if (config.m < 1) fail("m", "must be at least 1");
  if (config.beta.size() != 1 &&
      static_cast<int>(config.beta.size()) != config.m) {
    fail("beta", "needs 1 or m entries");
  }
  for (double b : config.beta) {
    if (!(b > 0.0 && b < 0.5)) fail("beta", "entries must lie in (0, 0.5)");
  }
  if (config.n_list.empty()) fail("n_list", "empty");
  for (int n : config.n_list) {
    if (n < config.m + 1) fail("n_list", "every n must be at least m + 1");
  }
  if (config.replicas < 1) fail("replicas", "must be at least 1");
  if (config.node_budget < 1) fail("node_budget", "must be positive");
  if (config.threads < 0) fail("threads", "must be >= 0");
  if (config.script_trials < 1) fail("script_trials", "must be at least 1");
  if (config.slab_directions < 1) fail("slab_directions", "must be positive");
  if (config.slab_widths.empty()) fail("slab_widths", "empty");
  if (config.arrangement_samples < 1) {
    fail("arrangement_samples", "must be positive");
  }
  if (config.kind == ExperimentKind::kArrangement && config.m != 1) {
    fail("m", "arrangement runs need m = 1");
  }
  if (config.kind == ExperimentKind::kCensus) {
    for (int n : config.n_list) {
      if (n > config.census_cap) {
        fail("n_list", "n = " + std::to_string(n) + " exceeds census_cap " +
                           std::to_string(config.census_cap));
      }
    }
  }
}

std::string FormatConfig(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "kind=" << ToString(config.kind) << '\n'
      << "m=" << config.m << '\n'
      << "beta=" << JoinList(config.beta) << '\n'
      << "n_list=" << JoinList(config.n_list) << '\n'
      << "replicas=" << config.replicas << '\n'
      << "base_seed=" << config.base_seed << '\n'
      << "var_rule=" << ToString(config.var_rule) << '\n'
      << "node_rule=" << ToString(config.node_rule) << '\n'
      << "node_budget=" << config.node_budget << '\n'
      << "ip_cap=" << config.ip_cap << '\n'
      << "census_cap=" << config.census_cap << '\n'
      << "threads=" << config.threads << '\n'
      << "script_trials=" << config.script_trials << '\n'
      << "slab_directions=" << config.slab_directions << '\n'
      << "slab_widths=" << JoinList(config.slab_widths) << '\n'
      << "arrangement_samples=" << config.arrangement_samples << '\n';
  if (!config.rows_out.empty()) out << "rows_out=" << config.rows_out << '\n';
  if (!config.aggregate_out.empty()) {
    out << "aggregate_out=" << config.aggregate_out << '\n';
  }
  if (!config.timing_out.empty()) {
    out << "timing_out=" << config.timing_out << '\n';
  }
  return out.str();
}

nlohmann::json ToJson(const ExperimentConfig& config) {
  return {{"kind", ToString(config.kind)},
          {"m", config.m},
          {"beta", config.beta},
          {"n_list", config.n_list},
          {"replicas", config.replicas},
          {"base_seed", config.base_seed},
          {"var_rule", ToString(config.var_rule)},
          {"node_rule", ToString(config.node_rule)},
          {"node_budget", config.node_budget},
          {"ip_cap", config.ip_cap},
          {"census_cap", config.census_cap},
          {"script_trials", config.script_trials},
          {"slab_directions", config.slab_directions},
          {"slab_widths", config.slab_widths},
          {"arrangement_samples", config.arrangement_samples}};
}

std::uint64_t ReplicaSeed(std::uint64_t base_seed, int n, int replica) {
  return base_seed ^ Mix64((static_cast<std::uint64_t>(n) << 32) |
                           static_cast<std::uint32_t>(replica));
}

RunReport Run(const ExperimentConfig& config) {
  Validate(config);
  std::vector<Task> tasks;
  for (int n : config.n_list) {
    for (int r = 0; r < config.replicas; ++r) {
      Task task;
      task.n = n;
      task.replica = r;
      task.seed = ReplicaSeed(config.base_seed, n, r);
      task.where = "n=" + std::to_string(n) + " replica=" + std::to_string(r);
      tasks.push_back(std::move(task));
    }
  }
  std::vector<TaskOutput> outputs(tasks.size());
  internal::ParallelFor(
      static_cast<int>(tasks.size()), internal::ResolveThreads(config.threads),
      [&](int k) {
        const auto start = std::chrono::steady_clock::now();
        switch (config.kind) {
          case ExperimentKind::kSolve:
          case ExperimentKind::kScaling:
            outputs[k] = RunSolveTask(config, tasks[k]);
            break;
          case ExperimentKind::kCensus:
            outputs[k] = RunCensusTask(config, tasks[k]);
            break;
          case ExperimentKind::kSlabs:
            outputs[k] = RunSlabsTask(config, tasks[k]);
            break;
          case ExperimentKind::kArrangement:
            outputs[k] = RunArrangementTask(config, tasks[k]);
            break;
        }
        outputs[k].seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      });

  RunReport report;
  report.kind = config.kind;
  report.columns = ColumnsFor(config.kind);
  for (auto& out : outputs) {
    report.rows.push_back(out.cells);
    report.seconds.push_back(out.seconds);
    for (auto& f : out.failures) report.failures.push_back(std::move(f));
  }
  report.aggregate = Aggregate(config, tasks, outputs);
  report.aggregate["config"] = ToJson(config);
  report.aggregate["failures"] = report.failures;
  return report;
}

void WriteRowsCsv(const RunReport& report, std::ostream& out) {
  out << "# packbb-rows v1 kind=" << ToString(report.kind) << '\n';
  const auto write = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
    out << '\n';
  };
  write(report.columns);
  for (const auto& row : report.rows) write(row);
}

void WriteOutputs(const ExperimentConfig& config, const RunReport& report) {
  const auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
  };
  if (!config.rows_out.empty()) {
    auto out = open(config.rows_out);
    WriteRowsCsv(report, out);
  }
  if (!config.aggregate_out.empty()) {
    auto out = open(config.aggregate_out);
    out << report.aggregate.dump(2) << '\n';
  }
  if (!config.timing_out.empty()) {
    auto out = open(config.timing_out);
    out << "n,replica,seconds\n";
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
      out << report.rows[k][0] << ',' << report.rows[k][1] << ','
          << report.seconds[k] << '\n';
    }
  }
}

double Median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double LeastSquaresSlope(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("slope needs two or more paired points");
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace packbb
