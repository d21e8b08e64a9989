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

#ifndef PROPEL_TESTS_TEST_UTIL_H_
#define PROPEL_TESTS_TEST_UTIL_H_

#include <cmath>
#include <vector>

#include "propel/mip.hpp"
#include "propel/rng.hpp"
#include "propel/scp.hpp"

namespace propel::testutil {

// Single part, single product, single period: optimum z=2, x=2, u=1 with
// objective 12 (production 2, unmet penalty 10).
inline ScpInstance micro_scp() {
  ScpInstance inst;
  inst.name = "micro";
  inst.topology.num_products = 1;
  inst.topology.num_parts = 1;
  inst.topology.num_periods = 1;
  inst.topology.satisfies = {{0}};
  inst.topology.cap_groups = {{0}};
  inst.topology.initial_inventory = {0.0};
  inst.demand = {{3}};
  inst.capacity = {{2.0}};
  inst.inv_cost = {{1.0}};
  inst.prod_cost = {{1.0}};
  inst.unmet_penalty = {{10.0}};
  return inst;
}

// Random micro instance whose integer enumeration stays within `max_enum`
// (caller should verify via brute_force). Shapes stay tiny on purpose.
inline ScpInstance random_micro_scp(Rng& rng) {
  ScpInstance inst;
  const int M = 1 + static_cast<int>(rng.uniform_int(2));
  const int N = 1 + static_cast<int>(rng.uniform_int(2));
  const int T = 1 + static_cast<int>(rng.uniform_int(2));
  inst.name = "micro-rand";
  inst.topology.num_products = M;
  inst.topology.num_parts = N;
  inst.topology.num_periods = T;
  inst.topology.satisfies.assign(static_cast<std::size_t>(N), {});
  for (int i = 0; i < M; ++i) {
    inst.topology.satisfies[rng.uniform_int(static_cast<std::size_t>(N))]
        .push_back(i);
  }
  // Every part must serve something or its production variable is dead
  // weight; give empty parts the first product.
  for (auto& s : inst.topology.satisfies) {
    if (s.empty()) s.push_back(0);
  }
  inst.topology.cap_groups = {{}};
  for (int j = 0; j < N; ++j) inst.topology.cap_groups[0].push_back(j);
  inst.topology.initial_inventory.assign(static_cast<std::size_t>(N), 0.0);
  inst.demand.assign(static_cast<std::size_t>(M),
                     std::vector<int>(static_cast<std::size_t>(T), 0));
  for (auto& row : inst.demand) {
    for (int& d : row) d = static_cast<int>(rng.uniform_int(3));
  }
  inst.capacity = {std::vector<double>(static_cast<std::size_t>(T), 0.0)};
  for (double& c : inst.capacity[0]) {
    c = 1.0 + static_cast<double>(rng.uniform_int(4));
  }
  auto fill = [&rng](std::vector<std::vector<double>>& a, int rows, int cols,
                     double lo, double hi) {
    a.assign(static_cast<std::size_t>(rows),
             std::vector<double>(static_cast<std::size_t>(cols), 0.0));
    for (auto& row : a) {
      for (double& v : row) v = rng.uniform(lo, hi);
    }
  };
  fill(inst.inv_cost, N, T, 0.5, 2.0);
  fill(inst.prod_cost, N, T, 0.5, 3.0);
  fill(inst.unmet_penalty, M, T, 2.0, 15.0);
  return inst;
}

// Product of integer domain sizes, capped to avoid overflow.
inline double integer_domain_product(const MipInstance& mip) {
  double prod = 1.0;
  for (const Variable& v : mip.vars) {
    if (!v.is_integer) continue;
    prod *= std::floor(v.ub) - std::ceil(v.lb) + 1.0;
    if (prod > 1e15) return prod;
  }
  return prod;
}

// The worked planning example: one part serving three products a, b, c over
// two periods; product a due in the first period, b and c in the second.
// Built in due-date (window) mode so each product has one demand row.
inline ScpInstance worked_example_scp() {
  ScpInstance inst;
  inst.name = "worked";
  inst.topology.num_products = 3;
  inst.topology.num_parts = 1;
  inst.topology.num_periods = 2;
  inst.topology.satisfies = {{0, 1, 2}};
  inst.topology.cap_groups = {{0}};
  inst.topology.initial_inventory = {0.0};
  inst.demand = {{2, 0}, {0, 3}, {0, 4}};
  inst.capacity = {{10.0, 10.0}};
  inst.inv_cost = {{1.0, 1.0}};
  inst.prod_cost = {{1.0, 1.0}};
  inst.unmet_penalty = {{10.0, 10.0}, {10.0, 10.0}, {10.0, 10.0}};
  return inst;
}

}  // namespace propel::testutil

#endif  // PROPEL_TESTS_TEST_UTIL_H_
