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


// Command line front end: instance generation, single solves, census
// verification and the batch experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "packbb/bb.h"
#include "packbb/harness.h"
#include "packbb/instance.h"
#include "packbb/oracle.h"

namespace {

using packbb::ExperimentConfig;
using packbb::ExperimentKind;

constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kVarRules = {"first", "most-fractional",
                                            "random", "adversarial-replay"};
const std::vector<std::string> kNodeRules = {"best-bound", "depth-first"};

std::string Bits(const packbb::BinaryVector& x) {
  std::string s;
  for (auto v : x) s.push_back(v ? '1' : '0');
  return s;
}

struct SolveFlags {
  std::string path;
  std::string node_rule = "best-bound";
  std::string var_rule = "first";
  std::uint64_t seed = 0;
  std::vector<int> script;
  std::int64_t budget = 10'000'000;
  std::string tree_dump;
};

void AddSolveFlags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("instance", f.path, "Instance file")->required();
  cmd->add_option("--node-rule", f.node_rule, "Open-leaf selection rule")
      ->check(CLI::IsMember(kNodeRules));
  cmd->add_option("--var-rule", f.var_rule, "Branching variable rule")
      ->check(CLI::IsMember(kVarRules));
  cmd->add_option("--seed", f.seed, "Seed for --var-rule random");
  cmd->add_option("--script", f.script,
                  "Branching indices (0-based) for adversarial-replay")
      ->delimiter(',');
  cmd->add_option("--budget", f.budget, "Node budget");
}

packbb::BbOptions ToBbOptions(const SolveFlags& f) {
  packbb::BbOptions options;
  options.node_rule = packbb::ParseNodeRule(f.node_rule);
  options.node_budget = f.budget;
  switch (packbb::ParseVariableRuleKind(f.var_rule)) {
    case packbb::VariableRuleKind::kFirst:
      options.var_rule = packbb::VariableRule::First();
      break;
    case packbb::VariableRuleKind::kMostFractional:
      options.var_rule = packbb::VariableRule::MostFractional();
      break;
    case packbb::VariableRuleKind::kRandom:
      options.var_rule = packbb::VariableRule::Random(f.seed);
      break;
    case packbb::VariableRuleKind::kAdversarialReplay:
      if (f.script.empty()) {
        throw CLI::ValidationError("--script",
                                   "adversarial-replay needs --script");
      }
      options.var_rule = packbb::VariableRule::Replay(f.script);
      break;
  }
  return options;
}

nlohmann::json ToJson(const packbb::BbResult& r, const SolveFlags& f) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& u : r.incumbent_trace) trace.push_back({u.node, u.value});
  nlohmann::json j;
  j["opt_value"] = r.has_incumbent() ? nlohmann::json(r.opt_value) : nullptr;
  j["opt_solution"] = Bits(r.opt_solution);
  j["node_count"] = r.node_count;
  j["branched_count"] = r.branched_count;
  j["prune_counts"] = {{"integrality", r.prune_counts.integrality},
                       {"infeasible", r.prune_counts.infeasible},
                       {"bound", r.prune_counts.bound}};
  j["incumbent_trace"] = std::move(trace);
  j["root_lp_value"] = r.root_lp_value;
  j["lp_solves"] = r.lp_solves;
  j["budget_exhausted"] = r.budget_exhausted;
  j["best_bound_violations"] = packbb::CountBestBoundViolations(r);
  j["node_rule"] = f.node_rule;
  j["var_rule"] = f.var_rule;
  j["branch_sequence"] = r.branch_sequence;
  return j;
}

// Flags shared by the batch experiments; they mirror the config keys.
void AddExperimentFlags(CLI::App* cmd, ExperimentConfig& c,
                        std::string& var_rule, std::string& node_rule) {
  cmd->add_option("-m", c.m, "Rows");
  cmd->add_option("--beta", c.beta, "b_i / n, one value or m values")
      ->delimiter(',');
  cmd->add_option("--n-list", c.n_list, "Instance sizes")->delimiter(',');
  cmd->add_option("--replicas", c.replicas, "Instances per size");
  cmd->add_option("--base-seed", c.base_seed, "Base seed");
  cmd->add_option("--var-rule", var_rule, "Branching variable rule")
      ->check(CLI::IsMember(kVarRules));
  cmd->add_option("--node-rule", node_rule, "Open-leaf selection rule")
      ->check(CLI::IsMember(kNodeRules));
  cmd->add_option("--node-budget", c.node_budget, "Node budget per solve");
  cmd->add_option("--threads", c.threads, "Workers (0 = all cores)");
  cmd->add_option("--script-trials", c.script_trials,
                  "Random trees searched per instance by adversarial-replay");
  cmd->add_option("--census-cap", c.census_cap, "Largest n for a census");
  cmd->add_option("--slab-directions", c.slab_directions,
                  "Directions per instance");
  cmd->add_option("--slab-widths", c.slab_widths,
                  "Width exponents i, width = 2^i log(n)/n")
      ->delimiter(',');
  cmd->add_option("--samples", c.arrangement_samples,
                  "Sampled duals per instance");
  cmd->add_option("--rows-out", c.rows_out, "Row CSV path");
  cmd->add_option("--aggregate-out", c.aggregate_out, "Aggregate JSON path");
  cmd->add_option("--timing-out", c.timing_out, "Per-row timing CSV path");
}

int RunExperiment(const ExperimentConfig& config) {
  const auto report = packbb::Run(config);
  packbb::WriteOutputs(config, report);
  std::cout << report.aggregate.dump(2) << '\n';
  for (const auto& f : report.failures) std::cerr << "FAILED " << f << '\n';
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch and bound for random packing integer programs"};
  app.require_subcommand(1);

  // generate
  int gen_m = 1;
  int gen_n = 0;
  std::vector<double> gen_beta{0.25};
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a random instance");
  generate->add_option("-m", gen_m, "Rows");
  generate->add_option("-n", gen_n, "Columns")->required();
  generate->add_option("--beta", gen_beta, "b_i / n, one value or m values")
      ->delimiter(',');
  generate->add_option("--seed", gen_seed, "Seed");
  generate->add_option("-o,--output", gen_out, "Output file (default stdout)");

  // solve
  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  AddSolveFlags(solve, solve_flags);
  solve->add_option("--tree-dump", solve_flags.tree_dump,
                    "Write 'id parent status branch_var lp_value depth' "
                    "lines here ('-' for stderr)");

  // census
  SolveFlags census_flags;
  packbb::OracleLimits limits;
  bool no_points = false;
  auto* census = app.add_subcommand(
      "census", "Enumerate the good set and check the tree-size bound");
  AddSolveFlags(census, census_flags);
  census->add_option("--census-cap", limits.census_cap, "Largest n allowed");
  census->add_option("--ip-cap", limits.ip_cap, "Largest n for the IP oracle");
  census->add_option("--threads", limits.threads, "Workers (0 = all cores)");
  census->add_flag("--no-points", no_points, "Omit the good points");

  // batch experiments
  struct Batch {
    ExperimentConfig config;
    std::string var_rule = "first";
    std::string node_rule = "best-bound";
    CLI::App* cmd = nullptr;
  };
  std::vector<std::pair<ExperimentKind, const char*>> kinds = {
      {ExperimentKind::kScaling, "Node counts and gaps across sizes"},
      {ExperimentKind::kSlabs, "Slab counts of the item points"},
      {ExperimentKind::kArrangement, "Dual cells for one-row instances"}};
  std::vector<Batch> batches(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    auto& b = batches[k];
    b.config.kind = kinds[k].first;
    b.cmd = app.add_subcommand(std::string(packbb::ToString(kinds[k].first)),
                               kinds[k].second);
    AddExperimentFlags(b.cmd, b.config, b.var_rule, b.node_rule);
  }

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "key=value config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) {
      if (gen_beta.size() == 1 && gen_m > 1) {
        gen_beta.assign(gen_m, gen_beta[0]);
      }
      const auto inst = packbb::Generate(gen_m, gen_n, gen_beta, gen_seed);
      if (gen_out.empty()) {
        packbb::Save(inst, std::cout);
      } else {
        packbb::Save(inst, gen_out);
      }
      return 0;
    }
    if (*solve) {
      const auto inst = packbb::Load(solve_flags.path);
      const auto result = packbb::Solve(inst, ToBbOptions(solve_flags));
      if (!solve_flags.tree_dump.empty()) {
        if (solve_flags.tree_dump == "-") {
          packbb::WriteTreeDump(result, std::cerr);
        } else {
          std::ofstream dump(solve_flags.tree_dump);
          packbb::WriteTreeDump(result, dump);
        }
      }
      const auto json = ToJson(result, solve_flags);
      std::cout << json.dump(2) << '\n';
      const bool violated =
          !result.budget_exhausted &&
          result.node_rule == packbb::NodeRule::kBestBound &&
          json["best_bound_violations"].get<std::int64_t>() > 0;
      return violated ? kExitAssertion : 0;
    }
    if (*census) {
      const auto inst = packbb::Load(census_flags.path);
      auto report = packbb::GoodSet(inst, limits);
      const auto result = packbb::Solve(inst, ToBbOptions(census_flags));
      packbb::AttachTree(report, result);
      const bool association =
          !result.budget_exhausted &&
          packbb::VerifyBranchAssociation(inst, result, report);
      auto json = packbb::ToJson(report, !no_points);
      json["association"] = association;
      std::cout << json.dump(2) << '\n';
      return report.bound_satisfied && association ? 0 : kExitAssertion;
    }
    for (auto& b : batches) {
      if (!*b.cmd) continue;
      b.config.var_rule = packbb::ParseVariableRuleKind(b.var_rule);
      b.config.node_rule = packbb::ParseNodeRule(b.node_rule);
      return RunExperiment(b.config);
    }
    if (*run) return RunExperiment(packbb::ParseConfigFile(config_path));
  } catch (const packbb::OracleCapError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const packbb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const packbb::ScriptError& e) {
    std::cerr << "script error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const packbb::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const packbb::StructuralError& e) {
    std::cerr << "structural error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
  return 0;
}
