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

// LP relaxations of packing programs, solved by a dense bounded-variable
// primal simplex. Every optimal solution returned is a basic (vertex)
// solution, so at most m coordinates are fractional.

#ifndef PACKBB_LP_H_
#define PACKBB_LP_H_

#include <span>
#include <stdexcept>
#include <vector>

#include "packbb/instance.h"

namespace packbb {

// Cycling guard or singular basis. Never silently turned into a wrong answer.
class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Variables fixed by branching. J0 and J1 must be disjoint.
struct FixedSets {
  std::vector<int> zero;
  std::vector<int> one;

  bool ValidFor(int n) const;
  bool empty() const { return zero.empty() && one.empty(); }
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  // A coordinate is fractional iff min(x_j, 1 - x_j) > integrality_tol.
  double integrality_tol = 1e-6;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_streak = 50;
  // Iteration cap is iteration_factor * (n + m).
  int iteration_factor = 100;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  // The vectors below are empty unless status == kOptimal.
  std::vector<double> x;
  double value = 0.0;
  std::vector<int> fractional;  // ascending
  // Duals of the m packing rows.
  std::vector<double> lambda;
  // Duals of x_j <= 1 for free variables: max(0, c_j - <lambda, A^j>).
  // Zero for fixed variables.
  std::vector<double> mu;
  // Sum over j in J1 of -(c_j - <lambda, A^j>), so that
  // value = <rhs, lambda> + <1, mu> - fixed_correction.
  double fixed_correction = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
  bool integral() const { return optimal() && fractional.empty(); }
  double DualObjective(std::span<const double> rhs) const;
};

bool IsFractional(double v, double tol = 1e-6);

// max <c,x> s.t. Ax <= b, x_j = 0 (J0), x_j = 1 (J1), x in [0,1]^n.
// Throws std::invalid_argument when `fixed` is not valid for the instance.
LpSolution SolveLp(const PackingInstance& inst, const FixedSets& fixed,
                   const LpOptions& options = {});

// max <c,x> s.t. Ax = bprime, x in [0,1]^n. An empty slice is reported as
// status kInfeasible. Throws std::invalid_argument for a negative or
// wrongly sized bprime.
LpSolution SolveEqLp(const PackingInstance& inst,
                     std::span<const double> bprime,
                     const LpOptions& options = {});

// OPT(LP(b)) of the root relaxation.
double LpValue(const PackingInstance& inst);

}  // namespace packbb

#endif  // PACKBB_LP_H_
