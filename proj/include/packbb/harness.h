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


// Experiment runner behind the command line tool. A run is described by a
// flat key=value config, produces one CSV row per (n, replica) task in
// deterministic order plus a JSON aggregate that embeds the config.
//
// Instance seeds are base_seed ^ Mix64((n << 32) | replica).

#ifndef PACKBB_HARNESS_H_
#define PACKBB_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "packbb/bb.h"

namespace packbb {

// Invalid config; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kSolve, kCensus, kScaling, kSlabs, kArrangement };

std::string_view ToString(ExperimentKind kind);
ExperimentKind ParseExperimentKind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kScaling;
  int m = 1;
  // One entry per row, or a single entry used for every row.
  std::vector<double> beta{0.25};
  std::vector<int> n_list{50};
  int replicas = 1;
  std::uint64_t base_seed = 1;
  // adversarial-replay searches script_trials random-rule trees per
  // instance and replays the branch sequence of the largest one.
  VariableRuleKind var_rule = VariableRuleKind::kFirst;
  NodeRule node_rule = NodeRule::kBestBound;
  std::int64_t node_budget = 10'000'000;
  int ip_cap = 25;
  int census_cap = 20;
  int threads = 1;  // 0 = hardware concurrency
  int script_trials = 20;
  // Slab grid: slab_directions directions times widths
  // 2^i log(n) / n for i in slab_widths.
  int slab_directions = 10;
  std::vector<int> slab_widths{0, 1, 2, 3, 4};
  int arrangement_samples = 10000;
  // Empty paths are not written.
  std::string rows_out;
  std::string aggregate_out;
  std::string timing_out;  // wall-clock seconds per task, kept apart so the
                           // row CSV stays reproducible
};

ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig ParseConfigFile(const std::filesystem::path& path);

// Throws ConfigError.
void Validate(const ExperimentConfig& config);

// key=value text accepted by ParseConfig.
std::string FormatConfig(const ExperimentConfig& config);
nlohmann::json ToJson(const ExperimentConfig& config);

std::uint64_t ReplicaSeed(std::uint64_t base_seed, int n, int replica);

struct RunReport {
  ExperimentKind kind = ExperimentKind::kScaling;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // (n, replica) order
  std::vector<double> seconds;                 // per row
  nlohmann::json aggregate;
  // Hard assertion failures (tree bound, best-bound lemma, ...).
  std::vector<std::string> failures;

  // 0 when no assertion failed, 1 otherwise.
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

RunReport Run(const ExperimentConfig& config);

// First line is a "# packbb-rows v1 kind=..." comment, then the header.
void WriteRowsCsv(const RunReport& report, std::ostream& out);
void WriteOutputs(const ExperimentConfig& config, const RunReport& report);

double Median(std::vector<double> values);

// Least-squares slope of ys against xs.
double LeastSquaresSlope(const std::vector<double>& xs,
                         const std::vector<double>& ys);

}  // namespace packbb

#endif  // PACKBB_HARNESS_H_
