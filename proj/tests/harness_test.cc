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


#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "packbb/harness.h"
#include "packbb/rng.h"

namespace packbb {
namespace {

std::string Csv(const RunReport& report) {
  std::ostringstream out;
  WriteRowsCsv(report, out);
  return out.str();
}

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig FromText(const std::string& text) {
  std::istringstream in(text);
  return ParseConfig(in);
}

TEST_CASE("config parsing") {
  const auto config = FromText(
      "# scaling study\n"
      "kind = scaling\n"
      "m=2\n"
      "beta=0.2, 0.3\n"
      "n_list=10,20\n"
      "replicas=3\n"
      "base_seed=18446744073709551615\n"
      "var_rule=most-fractional\n"
      "node_rule=depth-first\n"
      "rows_out=rows.csv\n");
  CHECK(config.kind == ExperimentKind::kScaling);
  CHECK(config.m == 2);
  CHECK(config.beta == std::vector<double>{0.2, 0.3});
  CHECK(config.n_list == std::vector<int>{10, 20});
  CHECK(config.base_seed == UINT64_MAX);
  CHECK(config.var_rule == VariableRuleKind::kMostFractional);
  CHECK(config.node_rule == NodeRule::kDepthFirst);
  CHECK(config.rows_out == "rows.csv");

  const auto again = FromText(FormatConfig(config));
  CHECK(FormatConfig(again) == FormatConfig(config));
  CHECK(ToJson(again) == ToJson(config));
}

TEST_CASE("config errors name the field") {
  const auto message = [](const std::string& text) {
    try {
      FromText(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("m=two\n").find("'m'") != std::string::npos);
  CHECK(message("beta=0.7\n").find("'beta'") != std::string::npos);
  CHECK(message("m=2\nbeta=0.1,0.2,0.3\n").find("'beta'") != std::string::npos);
  CHECK(message("n_list=1\n").find("'n_list'") != std::string::npos);
  CHECK(message("colour=blue\n").find("'colour'") != std::string::npos);
  CHECK(message("var_rule=greedy\n").find("'var_rule'") != std::string::npos);
  CHECK(message("kind=census\nn_list=25\n").find("census_cap") !=
        std::string::npos);
  CHECK(message("kind=arrangement\nm=2\nbeta=0.2\n").find("'m'") !=
        std::string::npos);
  CHECK(message("m=1\nm=2\n").find("twice") != std::string::npos);
  CHECK(message("just words\n").find("line 1") != std::string::npos);
}

TEST_CASE("replica seeds") {
  CHECK(ReplicaSeed(1, 50, 0) == (1 ^ Mix64(std::uint64_t{50} << 32)));
  CHECK(ReplicaSeed(1, 50, 3) == (1 ^ Mix64((std::uint64_t{50} << 32) | 3)));
  CHECK(ReplicaSeed(1, 50, 0) != ReplicaSeed(1, 51, 0));
  CHECK(ReplicaSeed(1, 50, 0) != ReplicaSeed(2, 50, 0));
}

TEST_CASE("median and slope") {
  CHECK(Median({3, 1, 2}) == 2.0);
  CHECK(Median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS(Median({}));
  CHECK(LeastSquaresSlope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
  CHECK(LeastSquaresSlope({1, 2, 3, 4}, {2, 1, 4, 3}) == doctest::Approx(0.6));
  CHECK_THROWS(LeastSquaresSlope({1, 1}, {1, 2}));
}

TEST_CASE("scaling run has one row per (n, replica)") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kScaling;
  config.m = 1;
  config.beta = {0.25};
  config.n_list = {50, 100, 200, 400};
  config.replicas = 20;
  config.base_seed = 1;
  const auto report = Run(config);
  CHECK(report.exit_code() == 0);
  const auto rows = ParseCsv(Csv(report));
  REQUIRE(rows.size() == 81);
  CHECK(rows[0] == report.columns);
  CHECK(rows[1][0] == "50");
  CHECK(rows[1][1] == "0");
  CHECK(rows[80][0] == "400");
  CHECK(rows[80][1] == "19");
  CHECK(report.aggregate["per_n"].size() == 4);
  CHECK(report.aggregate["config"]["replicas"] == 20);
  CHECK(Csv(report).rfind("# packbb-rows v1 kind=scaling\n", 0) == 0);
}

TEST_CASE("aggregates can be recomputed from the rows") {
  ExperimentConfig config;
  config.n_list = {20, 30, 40};
  config.replicas = 7;
  config.var_rule = VariableRuleKind::kRandom;
  const auto report = Run(config);
  const auto rows = ParseCsv(Csv(report));
  std::map<int, std::vector<double>> nodes;
  std::map<int, std::vector<double>> gaps;
  int col_nodes = -1;
  int col_gap = -1;
  int col_gap_raw = -1;
  for (int c = 0; c < static_cast<int>(rows[0].size()); ++c) {
    if (rows[0][c] == "node_count") col_nodes = c;
    if (rows[0][c] == "gap_scaled") col_gap = c;
    if (rows[0][c] == "ip_gap") col_gap_raw = c;
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int n = std::stoi(rows[r][0]);
    nodes[n].push_back(std::stod(rows[r][col_nodes]));
    gaps[n].push_back(std::stod(rows[r][col_gap]));
    const double l = std::log(static_cast<double>(n));
    CHECK(std::stod(rows[r][col_gap]) ==
          doctest::Approx(std::stod(rows[r][col_gap_raw]) * n / (l * l)));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t k = 0;
  for (const auto& [n, values] : nodes) {
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const auto& agg = report.aggregate["per_n"][k++];
    CHECK(agg["n"] == n);
    CHECK(agg["median_node_count"].get<double>() == v[v.size() / 2]);
    std::vector<double> g = gaps[n];
    std::sort(g.begin(), g.end());
    CHECK(agg["median_gap_scaled"].get<double>() == g[g.size() / 2]);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(v[v.size() / 2]));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / xs.size();
    my += ys[i] / ys.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  CHECK(report.aggregate["loglog_slope"].get<double>() ==
        doctest::Approx(sxy / sxx));
}

TEST_CASE("runs are reproducible and independent of thread count") {
  ExperimentConfig config;
  config.m = 2;
  config.beta = {0.3, 0.2};
  config.n_list = {15, 25};
  config.replicas = 4;
  config.var_rule = VariableRuleKind::kRandom;
  const auto first = Csv(Run(config));
  CHECK(first == Csv(Run(config)));
  config.threads = 3;
  CHECK(first == Csv(Run(config)));
}

TEST_CASE("census run: every tree within its bound") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kCensus;
  config.m = 1;
  config.beta = {0.25};
  config.n_list = {12};
  config.replicas = 50;
  const auto report = Run(config);
  CHECK(report.rows.size() == 50);
  CHECK(report.exit_code() == 0);
  CHECK(report.aggregate["bound_violations"] == 0);
  CHECK(report.aggregate["association_failures"] == 0);
  for (const auto& row : report.rows) CHECK(row[7] == "true");
}

TEST_CASE("adversarial replay, arrangement and slab runs") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kCensus;
  config.m = 2;
  config.beta = {0.3};
  config.n_list = {10};
  config.replicas = 4;
  config.var_rule = VariableRuleKind::kAdversarialReplay;
  config.script_trials = 5;
  CHECK(Run(config).exit_code() == 0);

  config = {};
  config.kind = ExperimentKind::kArrangement;
  config.n_list = {10, 50};
  config.replicas = 2;
  config.arrangement_samples = 2000;
  const auto arrangement = Run(config);
  CHECK(arrangement.exit_code() == 0);
  CHECK(arrangement.aggregate["missing_samples"] == 0.0);

  config = {};
  config.kind = ExperimentKind::kSlabs;
  config.m = 3;
  config.beta = {0.2};
  config.n_list = {200};
  config.replicas = 3;
  const auto slabs = Run(config);
  CHECK(slabs.rows.size() == 3);
  CHECK(slabs.rows[0][3] == "50");  // 10 directions x 5 widths
}

}  // namespace
}  // namespace packbb
