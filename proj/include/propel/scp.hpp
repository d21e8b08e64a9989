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

#ifndef PROPEL_SCP_H_
#define PROPEL_SCP_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "propel/mip.hpp"

namespace propel {

// Static structure of a planning problem: which parts satisfy which product
// demands and which parts share capacity resources.
struct ScpTopology {
  int num_products = 0;  // M
  int num_parts = 0;     // N
  int num_periods = 0;   // T
  // satisfies[j] lists the products whose demand part j can serve.
  std::vector<std::vector<int>> satisfies;
  // cap_groups[m] lists the parts drawing on capacity resource m.
  std::vector<std::vector<int>> cap_groups;
  std::vector<double> initial_inventory;  // per part
};

struct ScpInstance {
  std::string name;
  ScpTopology topology;
  std::vector<std::vector<int>> demand;           // [product][period], >= 0
  std::vector<std::vector<double>> capacity;      // [resource][period]
  std::vector<std::vector<double>> inv_cost;      // [part][period]
  std::vector<std::vector<double>> prod_cost;     // [part][period]
  std::vector<std::vector<double>> unmet_penalty; // [product][period], > 0
};

ValidationReport validate_scp(const ScpInstance& inst);

struct ScpBuildOptions {
  // Default: one demand equality per (product, period). When set, demand is
  // aggregated per product over a satisfaction window ending at its single
  // due date (each product must then have demand in at most one period).
  bool demand_window = false;
};

// Builds the planning MIP: production and consumption variables are integer,
// inventory and unmet demand continuous. Variable and constraint names are
// structured (`z[j,t]`, `bal[j,t]`, ...) so downstream modules can recover
// role, part/product, and period. Throws std::invalid_argument on shape
// mismatches.
MipInstance build_scp_mip(const ScpInstance& inst,
                          const ScpBuildOptions& opts = {});

struct NoiseParams {
  double gauss_mean_scale = 0.0;
  double gauss_sd_scale = 0.0;
  double uniform_halfwidth = 0.2;
  bool multiplicative_uniform = true;  // epsilon' scales the demand value
  std::uint64_t seed = 0;
};

// Demand perturbation: D' = max(0, round(D + eps + eps' * D)) with
// eps ~ N(mu_it, sigma_it^2) and eps' ~ U[-w, w]. The per-(i,t) Gaussian
// parameters are drawn once per topology (they depend on the seed and the
// array shape only), so instances perturbed from the same topology share the
// same noise field.
ScpInstance perturb(const ScpInstance& base, const NoiseParams& p);

// Synthetic stand-in for historical snapshots: seasonal sinusoid plus linear
// trend with a per-product log-normal scale, zero outside a per-product
// window of live periods. Deterministic given the seed; all snapshots share
// topology and costs, while capacity tracks each snapshot's demand.
std::vector<ScpInstance> generate_snapshots(const ScpTopology& topology,
                                            int count, std::uint64_t seed);

struct DemandStats {
  double mean_of_means = 0.0;
  double sd_of_means = 0.0;
  double max_demand = 0.0;
};
DemandStats demand_stats(const std::vector<ScpInstance>& instances);

// Instance files: the generic schema plus an "scp" section.
nlohmann::ordered_json scp_to_json(const ScpInstance& inst);
ScpInstance scp_from_json(const nlohmann::json& j);
std::string demand_csv(const ScpInstance& inst);

}  // namespace propel

#endif  // PROPEL_SCP_H_
