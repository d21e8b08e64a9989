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

#ifndef PROPEL_METRICS_H_
#define PROPEL_METRICS_H_

#include <string>
#include <vector>

#include "propel/solve.hpp"

namespace propel {

// Incumbent history against a fixed relaxation bound. Times are seconds, or
// ticks when the solver ran on the deterministic clock.
struct GapTrace {
  double lp_star = 0.0;
  // (timestamp, objective), nondecreasing timestamps.
  std::vector<std::pair<double, double>> entries;
  double horizon = 0.0;
};

GapTrace make_trace(const MipResult& res, double lp_star, double horizon);

// Bounded primal gap: 0 when both values are zero, 1 on sign disagreement,
// otherwise |obj - lp_star| / max(|obj|, |lp_star|).
double primal_gap(double obj, double lp_star);

// Piecewise-constant gap over time: 1 before the first incumbent, then the
// gap of the latest incumbent at or before t.
double gap_at(const GapTrace& trace, double t);

// Exact integral of gap_at over [0, T].
double primal_integral(const GapTrace& trace, double T);

struct ResultRow {
  std::string instance;
  std::string method;
  double pi = 0.0;
  double pg = 0.0;
  double rt = 0.0;
  int n_fixed = 0;
  int n_int = 0;
};

// Versioned CSV: header "instance,method,pi,pg,rt,n_fixed,n_int".
std::string results_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(const std::string& text);

}  // namespace propel

#endif  // PROPEL_METRICS_H_
