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

#ifndef PROPEL_MIP_H_
#define PROPEL_MIP_H_

#include <limits>
#include <string>
#include <vector>

namespace propel {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInfinity;
  bool is_integer = false;
  double obj_coeff = 0.0;
};

// One sparse row. Terms are kept sorted by variable index with no duplicates.
struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

// Immutable after construction; shared freely across threads.
struct MipInstance {
  std::string name;
  Sense sense = Sense::kMinimize;
  std::vector<Variable> vars;
  std::vector<Constraint> cons;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_cons() const { return static_cast<int>(cons.size()); }
  int num_integers() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Total function: always returns a report, never throws.
ValidationReport validate(const MipInstance& mip);

// Undirected variable-constraint incidence graph. Edge (i, j) exists iff
// variable i has a nonzero coefficient in constraint j.
struct BipartiteGraph {
  std::vector<std::vector<int>> var_to_cons;
  std::vector<std::vector<int>> con_to_vars;
  int num_edges = 0;
};

BipartiteGraph build_bipartite_graph(const MipInstance& mip);

// Constraints reachable from variable `var` through the undirected graph.
std::vector<int> reachable_constraints(const BipartiteGraph& g, int var);

}  // namespace propel

#endif  // PROPEL_MIP_H_
