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

#ifndef PROPEL_SIMPLEX_H_
#define PROPEL_SIMPLEX_H_

#include <vector>

#include "propel/mip.hpp"

namespace propel {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct LpSolution {
  LpStatus status = LpStatus::kIterLimit;
  std::vector<double> primal;         // one value per structural variable
  double objective = 0.0;             // in the instance's own sense
  std::vector<double> reduced_costs;  // in the instance's own sense
  std::vector<double> duals;          // one value per constraint
  int iterations = 0;
};

// Bounded-variable primal revised simplex, two phases. The basis inverse is
// kept dense with product-form updates and periodically refactorized.
// Dantzig pricing with a Bland's-rule fallback once a degeneracy streak is
// detected. Integrality is ignored.
//
// Construction precomputes the column-major matrix; solve() takes the bounds
// to use, so branch-and-bound nodes can share one solver. solve() is const
// and safe to call from multiple threads.
class LpSolver {
 public:
  explicit LpSolver(const MipInstance& mip);

  LpSolution solve() const;
  LpSolution solve(const std::vector<double>& lb,
                   const std::vector<double>& ub) const;

  int num_structural() const { return n_; }

 private:
  int n_ = 0;  // structural columns
  int m_ = 0;  // rows
  Sense sense_ = Sense::kMinimize;
  // Column-major structural matrix.
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> obj_;  // minimization costs (negated for max)
  std::vector<double> rhs_;
  std::vector<RowSense> row_sense_;
  std::vector<double> default_lb_, default_ub_;
};

// Convenience wrapper for one-shot solves.
LpSolution solve_lp(const MipInstance& mip);

}  // namespace propel

#endif  // PROPEL_SIMPLEX_H_
