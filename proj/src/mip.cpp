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

#include "propel/mip.hpp"

#include <cmath>
#include <queue>
#include <unordered_set>

namespace propel {

int MipInstance::num_integers() const {
  int q = 0;
  for (const Variable& v : vars) q += v.is_integer ? 1 : 0;
  return q;
}

ValidationReport validate(const MipInstance& mip) {
  ValidationReport report;
  auto add = [&report](std::string msg) {
    report.violations.push_back(std::move(msg));
  };

  std::unordered_set<std::string> names;
  for (int i = 0; i < mip.num_vars(); ++i) {
    const Variable& v = mip.vars[i];
    if (v.name.empty()) add("var " + std::to_string(i) + ": empty name");
    if (!names.insert(v.name).second)
      add("var " + std::to_string(i) + ": duplicate name '" + v.name + "'");
    if (!(v.lb <= v.ub))
      add("var '" + v.name + "': lb > ub (" + std::to_string(v.lb) + " > " +
          std::to_string(v.ub) + ")");
    if (!std::isfinite(v.obj_coeff))
      add("var '" + v.name + "': non-finite objective coefficient");
    if (std::isnan(v.lb) || std::isnan(v.ub))
      add("var '" + v.name + "': NaN bound");
  }

  for (int j = 0; j < mip.num_cons(); ++j) {
    const Constraint& c = mip.cons[j];
    int prev = -1;
    for (const auto& [idx, coeff] : c.terms) {
      if (idx < 0 || idx >= mip.num_vars()) {
        add("con '" + c.name + "': term references var index " +
            std::to_string(idx) + " of " + std::to_string(mip.num_vars()));
        continue;
      }
      if (idx == prev)
        add("con '" + c.name + "': duplicate var index " + std::to_string(idx));
      else if (idx < prev)
        add("con '" + c.name + "': terms not sorted by var index");
      if (!std::isfinite(coeff))
        add("con '" + c.name + "': non-finite coefficient");
      prev = idx;
    }
    if (!std::isfinite(c.rhs)) add("con '" + c.name + "': non-finite rhs");
  }
  return report;
}

BipartiteGraph build_bipartite_graph(const MipInstance& mip) {
  BipartiteGraph g;
  g.var_to_cons.resize(mip.num_vars());
  g.con_to_vars.resize(mip.num_cons());
  for (int j = 0; j < mip.num_cons(); ++j) {
    for (const auto& [i, coeff] : mip.cons[j].terms) {
      if (coeff == 0.0) continue;
      g.var_to_cons[i].push_back(j);
      g.con_to_vars[j].push_back(i);
      ++g.num_edges;
    }
  }
  return g;
}

std::vector<int> reachable_constraints(const BipartiteGraph& g, int var) {
  std::vector<char> var_seen(g.var_to_cons.size(), 0);
  std::vector<char> con_seen(g.con_to_vars.size(), 0);
  std::queue<int> frontier;  // variable indices
  var_seen[var] = 1;
  frontier.push(var);
  std::vector<int> result;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int c : g.var_to_cons[v]) {
      if (con_seen[c]) continue;
      con_seen[c] = 1;
      result.push_back(c);
      for (int w : g.con_to_vars[c]) {
        if (!var_seen[w]) {
          var_seen[w] = 1;
          frontier.push(w);
        }
      }
    }
  }
  return result;
}

}  // namespace propel
