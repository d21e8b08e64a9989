// Copyright 2026 the PROPEL project
//
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

#include "propel/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace propel {

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kRefactorInterval = 64;

enum class ColStatus : char { kAtLower, kAtUpper, kBasic };

}  // namespace

LpSolver::LpSolver(const MipInstance& mip) {
  ValidationReport report = validate(mip);
  if (!report.ok()) {
    throw std::invalid_argument("invalid instance: " + report.violations[0]);
  }
  n_ = mip.num_vars();
  m_ = mip.num_cons();
  sense_ = mip.sense;
  cols_.resize(n_);
  obj_.resize(n_);
  default_lb_.resize(n_);
  default_ub_.resize(n_);
  const double flip = sense_ == Sense::kMaximize ? -1.0 : 1.0;
  for (int j = 0; j < n_; ++j) {
    obj_[j] = flip * mip.vars[j].obj_coeff;
    default_lb_[j] = mip.vars[j].lb;
    default_ub_[j] = mip.vars[j].ub;
    if (!std::isfinite(default_lb_[j])) {
      throw std::invalid_argument("free variables (lb = -inf) not supported: " +
                                  mip.vars[j].name);
    }
  }
  rhs_.resize(m_);
  row_sense_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    rhs_[i] = mip.cons[i].rhs;
    row_sense_[i] = mip.cons[i].sense;
    for (const auto& [j, coeff] : mip.cons[i].terms) {
      if (coeff != 0.0) cols_[j].emplace_back(i, coeff);
    }
  }
}

LpSolution LpSolver::solve() const { return solve(default_lb_, default_ub_); }

LpSolution LpSolver::solve(const std::vector<double>& lb,
                           const std::vector<double>& ub) const {
  const int n = n_;
  const int m = m_;
  const int total = n + 2 * m;  // structural | slacks | artificials

  std::vector<double> clb(total), cub(total), cost(total, 0.0);
  std::vector<double> art_coef(m, 1.0);
  for (int j = 0; j < n; ++j) {
    clb[j] = lb[j];
    cub[j] = ub[j];
  }
  for (int i = 0; i < m; ++i) {
    const int sj = n + i;
    switch (row_sense_[i]) {
      case RowSense::kLessEqual:
      case RowSense::kGreaterEqual:
        clb[sj] = 0.0;
        cub[sj] = kInfinity;
        break;
      case RowSense::kEqual:
        clb[sj] = cub[sj] = 0.0;
        break;
    }
    clb[n + m + i] = cub[n + m + i] = 0.0;  // opened per-row below if needed
  }

  // Sparse column accessor covering slacks and artificials.
  std::vector<std::pair<int, double>> logical_col(1);
  auto column = [&](int j) -> const std::vector<std::pair<int, double>>& {
    if (j < n) return cols_[j];
    if (j < n + m) {
      const int i = j - n;
      logical_col[0] = {i, row_sense_[i] == RowSense::kGreaterEqual ? -1.0
                                                                    : 1.0};
    } else {
      const int i = j - n - m;
      logical_col[0] = {i, art_coef[i]};
    }
    return logical_col;
  };

  std::vector<ColStatus> status(total, ColStatus::kAtLower);
  auto nonbasic_value = [&](int j) {
    return status[j] == ColStatus::kAtUpper ? cub[j] : clb[j];
  };

  LpSolution result;
  for (int j = 0; j < n; ++j) {
    if (clb[j] > cub[j]) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
  }

  // Initial basis: slack where the slack alone absorbs the residual, else an
  // artificial with matching sign.
  std::vector<int> basic(m);
  std::vector<double> xbasic(m);
  std::vector<double> residual(rhs_);
  for (int j = 0; j < n; ++j) {
    const double v = clb[j];
    if (v != 0.0) {
      for (const auto& [i, coeff] : cols_[j]) residual[i] -= coeff * v;
    }
  }
  Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(m, m);
  bool any_artificial = false;
  for (int i = 0; i < m; ++i) {
    const double r = residual[i];
    if (row_sense_[i] == RowSense::kLessEqual && r >= 0.0) {
      basic[i] = n + i;
      xbasic[i] = r;
    } else if (row_sense_[i] == RowSense::kGreaterEqual && r <= 0.0) {
      basic[i] = n + i;
      xbasic[i] = -r;
      binv(i, i) = -1.0;
    } else {
      art_coef[i] = r >= 0.0 ? 1.0 : -1.0;
      basic[i] = n + m + i;
      xbasic[i] = std::abs(r);
      binv(i, i) = art_coef[i];
      cub[n + m + i] = kInfinity;
      any_artificial = true;
    }
    status[basic[i]] = ColStatus::kBasic;
  }

  const int iter_limit = 2000 + 60 * (n + m);
  int iterations = 0;
  int pivots_since_refactor = 0;
  int degenerate_streak = 0;
  bool use_bland = false;

  auto refactorize = [&]() {
    if (m == 0) return true;
    Eigen::MatrixXd b_mat = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      for (const auto& [i, coeff] : column(basic[k])) b_mat(i, k) = coeff;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b_mat);
    if (std::abs(lu.determinant()) < 1e-300) return false;
    binv = lu.inverse();
    // Recompute basic values from the nonbasic point.
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) r(i) = rhs_[i];
    for (int j = 0; j < total; ++j) {
      if (status[j] == ColStatus::kBasic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0) {
        for (const auto& [i, coeff] : column(j)) r(i) -= coeff * v;
      }
    }
    Eigen::VectorXd xb = binv * r;
    for (int i = 0; i < m; ++i) xbasic[i] = xb(i);
    pivots_since_refactor = 0;
    return true;
  };

  // Returns LpStatus for the phase; kOptimal means "phase converged".
  auto run_phase = [&]() -> LpStatus {
    while (true) {
      if (iterations >= iter_limit) return LpStatus::kIterLimit;
      if (pivots_since_refactor >= kRefactorInterval) {
        if (!refactorize()) return LpStatus::kIterLimit;
      }

      // y = Binv^T c_B, then price all nonbasic columns.
      std::vector<double> y(m, 0.0);
      for (int k = 0; k < m; ++k) {
        const double ck = cost[basic[k]];
        if (ck == 0.0) continue;
        for (int i = 0; i < m; ++i) y[i] += ck * binv(k, i);
      }

      int entering = -1;
      double best_score = 0.0;
      for (int j = 0; j < total; ++j) {
        if (status[j] == ColStatus::kBasic || clb[j] == cub[j]) continue;
        double d = cost[j];
        for (const auto& [i, coeff] : column(j)) d -= y[i] * coeff;
        double score = 0.0;
        if (status[j] == ColStatus::kAtLower && d < -kDualTol) {
          score = -d;
        } else if (status[j] == ColStatus::kAtUpper && d > kDualTol) {
          score = d;
        } else {
          continue;
        }
        if (use_bland) {
          entering = j;
          break;
        }
        if (score > best_score) {
          best_score = score;
          entering = j;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      std::vector<double> w(m, 0.0);
      {
        const auto& col = column(entering);
        for (int i = 0; i < m; ++i) {
          double acc = 0.0;
          for (const auto& [r, coeff] : col) acc += binv(i, r) * coeff;
          w[i] = acc;
        }
      }

      const double sigma = status[entering] == ColStatus::kAtLower ? 1.0
                                                                   : -1.0;
      double t = cub[entering] - clb[entering];  // own-bound flip distance
      int leaving_row = -1;
      for (int i = 0; i < m; ++i) {
        const double sw = sigma * w[i];
        double limit;
        if (sw > kPivotTol) {
          limit = (xbasic[i] - clb[basic[i]]) / sw;
        } else if (sw < -kPivotTol) {
          const double ub_i = cub[basic[i]];
          if (ub_i == kInfinity) continue;
          limit = (xbasic[i] - ub_i) / sw;
        } else {
          continue;
        }
        if (limit < 0.0) limit = 0.0;
        if (limit < t - 1e-12 ||
            (leaving_row >= 0 && limit < t + 1e-12 &&
             (use_bland ? basic[i] < basic[leaving_row]
                        : std::abs(w[i]) > std::abs(w[leaving_row])))) {
          t = limit;
          leaving_row = i;
        }
      }

      if (t == kInfinity) return LpStatus::kUnbounded;

      ++iterations;
      degenerate_streak = t <= 1e-11 ? degenerate_streak + 1 : 0;
      if (degenerate_streak > 3 * (m + 16)) use_bland = true;

      for (int i = 0; i < m; ++i) xbasic[i] -= sigma * t * w[i];

      if (leaving_row < 0) {
        // Bound flip, basis unchanged.
        status[entering] = status[entering] == ColStatus::kAtLower
                               ? ColStatus::kAtUpper
                               : ColStatus::kAtLower;
        continue;
      }

      const int leaving = basic[leaving_row];
      status[leaving] = sigma * w[leaving_row] > 0.0 ? ColStatus::kAtLower
                                                     : ColStatus::kAtUpper;
      const double entering_value =
          (sigma > 0.0 ? clb[entering] : cub[entering]) + sigma * t;
      basic[leaving_row] = entering;
      status[entering] = ColStatus::kBasic;
      xbasic[leaving_row] = entering_value;

      // Product-form update of the basis inverse.
      const double pivot = w[leaving_row];
      const double inv_pivot = 1.0 / pivot;
      for (int c = 0; c < m; ++c) binv(leaving_row, c) *= inv_pivot;
      for (int i = 0; i < m; ++i) {
        if (i == leaving_row || w[i] == 0.0) continue;
        const double f = w[i];
        for (int c = 0; c < m; ++c) binv(i, c) -= f * binv(leaving_row, c);
      }
      ++pivots_since_refactor;
    }
  };

  // Phase 1: drive artificials out.
  if (any_artificial) {
    for (int i = 0; i < m; ++i) cost[n + m + i] = 1.0;
    const LpStatus st = run_phase();
    if (st == LpStatus::kIterLimit) {
      result.status = LpStatus::kIterLimit;
      result.iterations = iterations;
      return result;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      if (basic[i] >= n + m) infeas += xbasic[i];
    }
    if (st == LpStatus::kUnbounded || infeas > kFeasTol) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      cost[n + m + i] = 0.0;
      cub[n + m + i] = 0.0;  // artificials may stay basic, pinned at zero
    }
    use_bland = false;
    degenerate_streak = 0;
  }

  // Phase 2.
  for (int j = 0; j < n; ++j) cost[j] = obj_[j];
  const LpStatus st = run_phase();
  result.iterations = iterations;
  if (st != LpStatus::kOptimal) {
    result.status = st;
    return result;
  }
  refactorize();

  result.status = LpStatus::kOptimal;
  result.primal.resize(n);
  for (int j = 0; j < n; ++j) result.primal[j] = nonbasic_value(j);
  for (int i = 0; i < m; ++i) {
    if (basic[i] < n) result.primal[basic[i]] = xbasic[i];
  }
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += obj_[j] * result.primal[j];

  std::vector<double> y(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const double ck = cost[basic[k]];
    if (ck == 0.0) continue;
    for (int i = 0; i < m; ++i) y[i] += ck * binv(k, i);
  }
  result.reduced_costs.resize(n);
  for (int j = 0; j < n; ++j) {
    if (status[j] == ColStatus::kBasic) {
      result.reduced_costs[j] = 0.0;
      continue;
    }
    double d = cost[j];
    for (const auto& [i, coeff] : cols_[j]) d -= y[i] * coeff;
    result.reduced_costs[j] = d;
  }
  result.duals = y;

  // Report in the instance's own sense.
  if (sense_ == Sense::kMaximize) {
    obj = -obj;
    for (double& d : result.reduced_costs) d = -d;
    for (double& v : result.duals) v = -v;
  }
  result.objective = obj;
  return result;
}

LpSolution solve_lp(const MipInstance& mip) { return LpSolver(mip).solve(); }

}  // namespace propel
