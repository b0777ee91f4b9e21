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

#include "packbb/lp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace packbb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kTieTol = 1e-12;
constexpr int kRefactorInterval = 64;

enum class RowSense { kLessEqual, kEqual };

// Revised bounded-variable primal simplex on
//
//   max cost^T z  s.t.  [A | I | diag(s)] z = rhs,  lo <= z <= up,
//
// where z = (x, slack, artificial). Slacks have bounds [0, inf) for packing
// rows and [0, 0] for equality rows. Artificials are only free during
// phase 1. The basis inverse is kept explicitly (m x m); m is small.
class BoundedSimplex {
 public:
  BoundedSimplex(const PackingInstance& inst, std::span<const double> rhs,
                 RowSense sense, const FixedSets* fixed,
                 const LpOptions& options)
      : inst_(inst),
        rhs_(rhs),
        options_(options),
        m_(inst.m()),
        n_(inst.n()),
        total_(inst.n() + 2 * inst.m()),
        cap_(options.iteration_factor * (inst.n() + inst.m())) {
    lo_.assign(total_, 0.0);
    up_.assign(total_, 1.0);
    cost_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    is_fixed_one_.assign(n_, false);
    if (fixed != nullptr) {
      for (int j : fixed->zero) up_[j] = 0.0;
      for (int j : fixed->one) {
        lo_[j] = 1.0;
        is_fixed_one_[j] = true;
      }
    }
    for (int j = 0; j < n_; ++j) x_[j] = lo_[j];
    for (int i = 0; i < m_; ++i) {
      up_[Slack(i)] = sense == RowSense::kLessEqual ? kInf : 0.0;
      up_[Artificial(i)] = kInf;
    }
    art_sign_.assign(m_, 1.0);
    head_.assign(m_, -1);
    row_of_.assign(total_, -1);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);

    std::vector<double> residual(rhs_.begin(), rhs_.end());
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      const auto col = inst_.column(j);
      for (int i = 0; i < m_; ++i) residual[i] -= col[i] * x_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const int slack = Slack(i);
      int basic;
      if (residual[i] >= lo_[slack] && residual[i] <= up_[slack]) {
        basic = slack;
        x_[slack] = residual[i];
      } else {
        basic = Artificial(i);
        art_sign_[i] = residual[i] >= 0.0 ? 1.0 : -1.0;
        x_[basic] = std::abs(residual[i]);
        needs_phase1_ = true;
      }
      head_[i] = basic;
      row_of_[basic] = i;
      binv_[static_cast<std::size_t>(i) * m_ + i] =
          basic == slack ? 1.0 : art_sign_[i];
    }
  }

  LpSolution Solve() {
    LpSolution solution;
    if (needs_phase1_) {
      for (int i = 0; i < m_; ++i) cost_[Artificial(i)] = -1.0;
      Optimize();
      double infeasibility = 0.0;
      double scale = 1.0;
      for (int i = 0; i < m_; ++i) {
        infeasibility += x_[Artificial(i)];
        scale = std::max(scale, std::abs(rhs_[i]));
      }
      if (infeasibility > options_.feasibility_tol * scale) {
        solution.status = LpStatus::kInfeasible;
        solution.iterations = iterations_;
        return solution;
      }
      for (int i = 0; i < m_; ++i) {
        cost_[Artificial(i)] = 0.0;
        up_[Artificial(i)] = 0.0;
        if (row_of_[Artificial(i)] < 0) x_[Artificial(i)] = 0.0;
      }
      DriveOutArtificials();
    } else {
      for (int i = 0; i < m_; ++i) up_[Artificial(i)] = 0.0;
    }
    for (int j = 0; j < n_; ++j) cost_[j] = inst_.c()[j];
    Optimize();
    return Extract();
  }

 private:
  int Slack(int i) const { return n_ + i; }
  int Artificial(int i) const { return n_ + m_ + i; }

  void Column(int k, std::vector<double>& out) const {
    if (k < n_) {
      const auto col = inst_.column(k);
      std::copy(col.begin(), col.end(), out.begin());
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    if (k < n_ + m_) {
      out[k - n_] = 1.0;
    } else {
      out[k - n_ - m_] = art_sign_[k - n_ - m_];
    }
  }

  double ReducedCost(int k, const std::vector<double>& y) const {
    if (k < n_) {
      const auto col = inst_.column(k);
      double d = cost_[k];
      for (int i = 0; i < m_; ++i) d -= y[i] * col[i];
      return d;
    }
    if (k < n_ + m_) return cost_[k] - y[k - n_];
    const int i = k - n_ - m_;
    return cost_[k] - y[i] * art_sign_[i];
  }

  // y^T = cost_B^T B^{-1}.
  void ComputeDuals(std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[head_[r]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(r) * m_];
      for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
  }

  void Ftran(const std::vector<double>& col, std::vector<double>& alpha) const {
    for (int r = 0; r < m_; ++r) {
      const double* row = &binv_[static_cast<std::size_t>(r) * m_];
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += row[i] * col[i];
      alpha[r] = s;
    }
  }

  void Pivot(int leave_row, const std::vector<double>& alpha) {
    double* prow = &binv_[static_cast<std::size_t>(leave_row) * m_];
    const double inv = 1.0 / alpha[leave_row];
    for (int i = 0; i < m_; ++i) prow[i] *= inv;
    for (int r = 0; r < m_; ++r) {
      if (r == leave_row || alpha[r] == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(r) * m_];
      for (int i = 0; i < m_; ++i) row[i] -= alpha[r] * prow[i];
    }
    ++since_refactor_;
  }

  // Rebuilds B^{-1} from the basis columns by Gauss-Jordan elimination and
  // recomputes the basic values from the nonbasic ones.
  void Refactor() {
    const int m = m_;
    std::vector<double> work(static_cast<std::size_t>(m) * 2 * m, 0.0);
    std::vector<double> col(m);
    for (int r = 0; r < m; ++r) {
      Column(head_[r], col);
      for (int i = 0; i < m; ++i) work[static_cast<std::size_t>(i) * 2 * m + r] = col[i];
    }
    for (int i = 0; i < m; ++i) work[static_cast<std::size_t>(i) * 2 * m + m + i] = 1.0;
    for (int p = 0; p < m; ++p) {
      int best = p;
      for (int i = p + 1; i < m; ++i) {
        if (std::abs(work[static_cast<std::size_t>(i) * 2 * m + p]) >
            std::abs(work[static_cast<std::size_t>(best) * 2 * m + p])) {
          best = i;
        }
      }
      if (std::abs(work[static_cast<std::size_t>(best) * 2 * m + p]) < 1e-13) {
        throw LpNumericalError("singular basis during refactorization");
      }
      if (best != p) {
        for (int k = 0; k < 2 * m; ++k) {
          std::swap(work[static_cast<std::size_t>(p) * 2 * m + k],
                    work[static_cast<std::size_t>(best) * 2 * m + k]);
        }
      }
      const double inv = 1.0 / work[static_cast<std::size_t>(p) * 2 * m + p];
      for (int k = 0; k < 2 * m; ++k) work[static_cast<std::size_t>(p) * 2 * m + k] *= inv;
      for (int i = 0; i < m; ++i) {
        if (i == p) continue;
        const double f = work[static_cast<std::size_t>(i) * 2 * m + p];
        if (f == 0.0) continue;
        for (int k = 0; k < 2 * m; ++k) {
          work[static_cast<std::size_t>(i) * 2 * m + k] -=
              f * work[static_cast<std::size_t>(p) * 2 * m + k];
        }
      }
    }
    // Row r of B^{-1} corresponds to basis position r.
    for (int r = 0; r < m; ++r) {
      for (int i = 0; i < m; ++i) {
        binv_[static_cast<std::size_t>(r) * m + i] =
            work[static_cast<std::size_t>(r) * 2 * m + m + i];
      }
    }
    std::vector<double> residual(rhs_.begin(), rhs_.end());
    for (int k = 0; k < total_; ++k) {
      if (row_of_[k] >= 0 || x_[k] == 0.0) continue;
      Column(k, col);
      for (int i = 0; i < m; ++i) residual[i] -= col[i] * x_[k];
    }
    std::vector<double> xb(m);
    Ftran(residual, xb);
    for (int r = 0; r < m; ++r) x_[head_[r]] = xb[r];
    since_refactor_ = 0;
  }

  void Optimize() {
    std::vector<double> y(m_), col(m_), alpha(m_);
    int streak = 0;
    while (true) {
      if (since_refactor_ >= kRefactorInterval) Refactor();
      ComputeDuals(y);
      const bool bland = streak >= options_.degeneracy_streak;

      int enter = -1;
      int dir = 0;
      double best = 0.0;
      for (int k = 0; k < total_; ++k) {
        if (row_of_[k] >= 0 || up_[k] <= lo_[k]) continue;
        const double d = ReducedCost(k, y);
        int kdir = 0;
        if (x_[k] <= lo_[k]) {
          if (d > options_.optimality_tol) kdir = 1;
        } else if (d < -options_.optimality_tol) {
          kdir = -1;
        }
        if (kdir == 0) continue;
        if (bland) {
          enter = k;
          dir = kdir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = k;
          dir = kdir;
        }
      }
      if (enter < 0) return;

      Column(enter, col);
      Ftran(col, alpha);

      // Basic values move by -dir * step * alpha.
      double step = up_[enter] - lo_[enter];
      int leave = -1;
      double leave_pivot = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = dir * alpha[r];
        const int v = head_[r];
        double limit;
        if (a > kPivotTol) {
          limit = (x_[v] - lo_[v]) / a;
        } else if (a < -kPivotTol) {
          if (up_[v] == kInf) continue;
          limit = (up_[v] - x_[v]) / (-a);
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < step - kTieTol;
        if (!take && leave >= 0 && limit <= step + kTieTol) {
          take = bland ? v < head_[leave] : std::abs(a) > leave_pivot;
        }
        if (take) {
          step = std::min(step, limit);
          leave = r;
          leave_pivot = std::abs(a);
        }
      }
      if (leave < 0 && step == kInf) {
        throw LpNumericalError("LP relaxation reported unbounded");
      }

      x_[enter] += dir * step;
      for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * step * alpha[r];
      if (leave < 0) {
        x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
      } else {
        const int v = head_[leave];
        x_[v] = dir * alpha[leave] > 0.0 ? lo_[v] : up_[v];
        Pivot(leave, alpha);
        head_[leave] = enter;
        row_of_[enter] = leave;
        row_of_[v] = -1;
      }
      streak = step <= kTieTol ? streak + 1 : 0;
      if (++iterations_ > cap_) {
        throw LpNumericalError("simplex iteration cap " +
                               std::to_string(cap_) + " exceeded");
      }
    }
  }

  // Degenerate pivots that replace basic artificials (value ~0 after a
  // successful phase 1) by structural or slack columns where possible.
  void DriveOutArtificials() {
    std::vector<double> col(m_), alpha(m_);
    bool pivoted = false;
    for (int r = 0; r < m_; ++r) {
      if (head_[r] < n_ + m_) continue;
      int pick = -1;
      double best = 1e-7;
      for (int k = 0; k < n_ + m_; ++k) {
        if (row_of_[k] >= 0 || up_[k] <= lo_[k]) continue;
        Column(k, col);
        const double* row = &binv_[static_cast<std::size_t>(r) * m_];
        double a = 0.0;
        for (int i = 0; i < m_; ++i) a += row[i] * col[i];
        if (std::abs(a) > best) {
          best = std::abs(a);
          pick = k;
        }
      }
      if (pick < 0) continue;  // redundant row; artificial stays at 0
      Column(pick, col);
      Ftran(col, alpha);
      const int v = head_[r];
      Pivot(r, alpha);
      head_[r] = pick;
      row_of_[pick] = r;
      row_of_[v] = -1;
      x_[v] = 0.0;
      pivoted = true;
    }
    if (pivoted) Refactor();
  }

  LpSolution Extract() const {
    LpSolution s;
    s.status = LpStatus::kOptimal;
    s.iterations = iterations_;
    s.x.resize(n_);
    for (int j = 0; j < n_; ++j) {
      s.x[j] = std::clamp(x_[j], lo_[j], up_[j]);
      if (IsFractional(s.x[j], options_.integrality_tol)) {
        s.fractional.push_back(j);
      }
    }
    s.value = inst_.Value(s.x);
    std::vector<double> y(m_);
    ComputeDuals(y);
    s.lambda = y;
    s.mu.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      const auto col = inst_.column(j);
      double r = inst_.c()[j];
      for (int i = 0; i < m_; ++i) r -= y[i] * col[i];
      if (is_fixed_one_[j]) {
        s.fixed_correction -= r;
      } else if (lo_[j] < up_[j]) {
        s.mu[j] = std::max(0.0, r);
      }
    }
    return s;
  }

  const PackingInstance& inst_;
  std::span<const double> rhs_;
  const LpOptions& options_;
  int m_;
  int n_;
  int total_;
  int cap_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<bool> is_fixed_one_;
  std::vector<double> art_sign_;
  std::vector<int> head_;
  std::vector<int> row_of_;
  std::vector<double> binv_;
  bool needs_phase1_ = false;
  int iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

bool FixedSets::ValidFor(int n) const {
  std::vector<char> seen(n, 0);
  for (const auto* set : {&zero, &one}) {
    for (int j : *set) {
      if (j < 0 || j >= n || seen[j]) return false;
      seen[j] = 1;
    }
  }
  return true;
}

double LpSolution::DualObjective(std::span<const double> rhs) const {
  double v = -fixed_correction;
  for (std::size_t i = 0; i < lambda.size(); ++i) v += rhs[i] * lambda[i];
  for (double u : mu) v += u;
  return v;
}

bool IsFractional(double v, double tol) { return std::min(v, 1.0 - v) > tol; }

LpSolution SolveLp(const PackingInstance& inst, const FixedSets& fixed,
                   const LpOptions& options) {
  if (!fixed.ValidFor(inst.n())) {
    throw std::invalid_argument("fixed sets are not valid for this instance");
  }
  BoundedSimplex simplex(inst, inst.b(), RowSense::kLessEqual, &fixed, options);
  return simplex.Solve();
}

LpSolution SolveEqLp(const PackingInstance& inst,
                     std::span<const double> bprime,
                     const LpOptions& options) {
  if (static_cast<int>(bprime.size()) != inst.m()) {
    throw std::invalid_argument("bprime must have m entries");
  }
  for (double v : bprime) {
    if (!(v >= 0.0)) throw std::invalid_argument("bprime must be nonnegative");
  }
  BoundedSimplex simplex(inst, bprime, RowSense::kEqual, nullptr, options);
  return simplex.Solve();
}

double LpValue(const PackingInstance& inst) {
  return SolveLp(inst, FixedSets{}).value;
}

}  // namespace packbb
