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

#ifndef PROPEL_SOLVE_H_
#define PROPEL_SOLVE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "propel/mip.hpp"
#include "propel/simplex.hpp"

namespace propel {

// A value within this distance of a whole number counts as integral.
inline constexpr double kIntegralityTol = 1e-6;

enum class MipStatus { kOptimal, kFeasible, kInfeasible, kTimeLimit };

struct MipResult {
  MipStatus status = MipStatus::kInfeasible;
  std::vector<double> best_solution;
  double best_objective = 0.0;
  double bound = 0.0;  // dual bound (<= best_objective for min)
  // (timestamp, objective) per incumbent; timestamps are wall-clock seconds,
  // or node counts in deterministic-clock mode.
  std::vector<std::pair<double, double>> trace;
  std::int64_t node_count = 0;

  bool has_solution() const {
    return status == MipStatus::kOptimal || status == MipStatus::kFeasible ||
           (status == MipStatus::kTimeLimit && !trace.empty());
  }
};

struct SolveLimits {
  // Interpreted as seconds, or as a node/tick budget when
  // deterministic_clock is set.
  double time_limit = 1e9;
  double rel_gap = 0.01;
  std::optional<std::int64_t> node_limit;
  bool deterministic_clock = false;
};

// Optional starting point, used as an initial incumbent (objective cutoff),
// not as a basis warm start.
struct WarmStart {
  std::vector<double> solution;
  double objective = 0.0;
};

// Branch and bound over the bounded-variable simplex. Branching picks the
// most fractional integer variable; node selection is best-bound with
// depth-first plunges until the first incumbent of each dive.
MipResult solve_mip(const MipInstance& mip, const SolveLimits& lim,
                    const std::optional<WarmStart>& warm_start = std::nullopt);

// Exact test oracle: enumerates all integer assignments within bounds and
// solves the continuous LP for each. Throws std::invalid_argument when the
// enumeration budget would be exceeded (checked before any work).
MipResult brute_force(const MipInstance& mip, std::int64_t max_enum);

class ExternalSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File adapter for external MPS-speaking solvers. The command template must
// contain the placeholders {in}, {out} and {timelimit}. The solution file is
// expected to hold `<var_name> <value>` lines plus an `=obj=` line.
// Throws ExternalSolveError on process failure or unparsable output.
MipResult external_solve(const MipInstance& mip,
                         const std::string& cmd_template,
                         const SolveLimits& lim);

// Parses/writes the solution-file format used by the adapter.
std::string format_solution_file(const MipInstance& mip, const MipResult& res);
MipResult parse_solution_file(const MipInstance& mip, const std::string& text);

}  // namespace propel

#endif  // PROPEL_SOLVE_H_
