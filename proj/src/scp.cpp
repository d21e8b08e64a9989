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

#include "propel/scp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "propel/rng.hpp"

namespace propel {

namespace {

std::string tag(const char* role, int a, int b) {
  std::ostringstream out;
  out << role << "[" << a << "," << b << "]";
  return out.str();
}

template <typename T>
bool shape_ok(const std::vector<std::vector<T>>& arr, int rows, int cols) {
  if (static_cast<int>(arr.size()) != rows) return false;
  for (const auto& row : arr) {
    if (static_cast<int>(row.size()) != cols) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate_scp(const ScpInstance& inst) {
  ValidationReport report;
  auto add = [&report](std::string msg) {
    report.violations.push_back(std::move(msg));
  };
  const ScpTopology& topo = inst.topology;
  const int M = topo.num_products;
  const int N = topo.num_parts;
  const int T = topo.num_periods;
  const int R = static_cast<int>(topo.cap_groups.size());
  if (M < 1 || N < 1 || T < 1) add("topology dimensions must be >= 1");
  if (static_cast<int>(topo.satisfies.size()) != N) {
    add("satisfies size != num_parts");
    return report;
  }
  std::vector<char> covered(std::max(M, 0), 0);
  for (int j = 0; j < N; ++j) {
    for (int i : topo.satisfies[j]) {
      if (i < 0 || i >= M) {
        add("satisfies[" + std::to_string(j) + "] references bad product " +
            std::to_string(i));
      } else {
        covered[i] = 1;
      }
    }
  }
  for (int i = 0; i < M; ++i) {
    if (!covered[i]) {
      add("product " + std::to_string(i) + " not servable by any part");
    }
  }
  for (int m = 0; m < R; ++m) {
    if (topo.cap_groups[m].empty()) {
      add("capacity group " + std::to_string(m) + " is empty");
    }
    for (int j : topo.cap_groups[m]) {
      if (j < 0 || j >= N) {
        add("cap_groups[" + std::to_string(m) + "] references bad part " +
            std::to_string(j));
      }
    }
  }
  if (static_cast<int>(topo.initial_inventory.size()) != N) {
    add("initial_inventory size != num_parts");
  }
  if (!shape_ok(inst.demand, M, T)) add("demand shape mismatch");
  if (!shape_ok(inst.capacity, R, T)) add("capacity shape mismatch");
  if (!shape_ok(inst.inv_cost, N, T)) add("inv_cost shape mismatch");
  if (!shape_ok(inst.prod_cost, N, T)) add("prod_cost shape mismatch");
  if (!shape_ok(inst.unmet_penalty, M, T)) add("unmet_penalty shape mismatch");
  if (report.ok()) {
    for (int i = 0; i < M; ++i) {
      for (int t = 0; t < T; ++t) {
        if (inst.demand[i][t] < 0) add("negative demand at " + tag("D", i, t));
        if (inst.unmet_penalty[i][t] <= 0.0) {
          add("non-positive penalty at " + tag("delta", i, t));
        }
      }
    }
    for (int m = 0; m < R; ++m) {
      for (int t = 0; t < T; ++t) {
        if (inst.capacity[m][t] < 0.0) {
          add("negative capacity at " + tag("P", m, t));
        }
      }
    }
  }
  return report;
}

MipInstance build_scp_mip(const ScpInstance& inst,
                          const ScpBuildOptions& opts) {
  ValidationReport report = validate_scp(inst);
  if (!report.ok()) {
    throw std::invalid_argument("invalid SCP instance: " +
                                report.violations[0]);
  }
  const ScpTopology& topo = inst.topology;
  const int M = topo.num_products;
  const int N = topo.num_parts;
  const int T = topo.num_periods;
  const int R = static_cast<int>(topo.cap_groups.size());

  // Single due date per product, only needed in window mode.
  std::vector<int> due(M, -1);
  if (opts.demand_window) {
    for (int i = 0; i < M; ++i) {
      for (int t = 0; t < T; ++t) {
        if (inst.demand[i][t] > 0) {
          if (due[i] >= 0) {
            throw std::invalid_argument(
                "demand_window requires at most one demand period per "
                "product");
          }
          due[i] = t;
        }
      }
    }
  }

  MipInstance mip;
  mip.name = inst.name.empty() ? "scp" : inst.name;
  mip.sense = Sense::kMinimize;

  // Remaining total demand servable by part j from period t on; a valid
  // upper bound for production (producing more than all remaining demand is
  // never needed) that keeps the integer domain finite.
  auto z_upper = [&](int j, int t) {
    double total = 0.0;
    for (int i : topo.satisfies[j]) {
      for (int tt = t; tt < T; ++tt) total += inst.demand[i][tt];
    }
    return total;
  };

  std::vector<std::vector<int>> z_idx(N, std::vector<int>(T));
  std::vector<std::vector<int>> x_idx(M, std::vector<int>(T));
  std::vector<std::vector<int>> y_idx(N, std::vector<int>(T));
  std::vector<std::vector<int>> u_idx(M, std::vector<int>(T));

  auto add_var = [&mip](std::string name, double lb, double ub, bool integer,
                        double obj) {
    Variable v;
    v.name = std::move(name);
    v.lb = lb;
    v.ub = ub;
    v.is_integer = integer;
    v.obj_coeff = obj;
    mip.vars.push_back(std::move(v));
    return mip.num_vars() - 1;
  };

  for (int j = 0; j < N; ++j) {
    for (int t = 0; t < T; ++t) {
      z_idx[j][t] =
          add_var(tag("z", j, t), 0.0, z_upper(j, t), true,
                  inst.prod_cost[j][t]);
    }
  }
  for (int i = 0; i < M; ++i) {
    for (int t = 0; t < T; ++t) {
      double ub;
      if (!opts.demand_window) {
        ub = inst.demand[i][t];
      } else {
        ub = (due[i] >= 0 && t <= due[i]) ? inst.demand[i][due[i]] : 0.0;
      }
      x_idx[i][t] = add_var(tag("x", i, t), 0.0, ub, true, 0.0);
    }
  }
  for (int j = 0; j < N; ++j) {
    for (int t = 0; t < T; ++t) {
      y_idx[j][t] =
          add_var(tag("y", j, t), 0.0, kInfinity, false, inst.inv_cost[j][t]);
    }
  }
  for (int i = 0; i < M; ++i) {
    for (int t = 0; t < T; ++t) {
      double ub;
      if (!opts.demand_window) {
        ub = inst.demand[i][t];
      } else {
        ub = due[i] == t ? inst.demand[i][t] : 0.0;
      }
      u_idx[i][t] = add_var(tag("u", i, t), 0.0, ub, false,
                            inst.unmet_penalty[i][t]);
    }
  }

  auto add_con = [&mip](std::string name,
                        std::vector<std::pair<int, double>> terms,
                        RowSense sense, double rhs) {
    Constraint c;
    c.name = std::move(name);
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    c.terms = std::move(terms);
    c.sense = sense;
    c.rhs = rhs;
    mip.cons.push_back(std::move(c));
  };

  // Inventory balance: y[j][t-1] + z[j][t] = sum_{i in S_j} x[i][t] + y[j][t].
  for (int j = 0; j < N; ++j) {
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      terms.emplace_back(z_idx[j][t], 1.0);
      if (t > 0) terms.emplace_back(y_idx[j][t - 1], 1.0);
      for (int i : topo.satisfies[j]) terms.emplace_back(x_idx[i][t], -1.0);
      terms.emplace_back(y_idx[j][t], -1.0);
      const double rhs = t == 0 ? -topo.initial_inventory[j] : 0.0;
      add_con(tag("bal", j, t), std::move(terms), RowSense::kEqual, rhs);
    }
  }

  // Demand satisfaction.
  if (!opts.demand_window) {
    for (int i = 0; i < M; ++i) {
      for (int t = 0; t < T; ++t) {
        add_con(tag("dem", i, t),
                {{x_idx[i][t], 1.0}, {u_idx[i][t], 1.0}}, RowSense::kEqual,
                inst.demand[i][t]);
      }
    }
  } else {
    for (int i = 0; i < M; ++i) {
      if (due[i] < 0) continue;
      std::vector<std::pair<int, double>> terms;
      for (int t = 0; t <= due[i]; ++t) terms.emplace_back(x_idx[i][t], 1.0);
      terms.emplace_back(u_idx[i][due[i]], 1.0);
      add_con(tag("dem", i, due[i]), std::move(terms), RowSense::kEqual,
              inst.demand[i][due[i]]);
    }
  }

  // Capacity: sum_{j in T_m} z[j][t] <= P[m][t].
  for (int m = 0; m < R; ++m) {
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (int j : topo.cap_groups[m]) terms.emplace_back(z_idx[j][t], 1.0);
      add_con(tag("cap", m, t), std::move(terms), RowSense::kLessEqual,
              inst.capacity[m][t]);
    }
  }
  return mip;
}

ScpInstance perturb(const ScpInstance& base, const NoiseParams& p) {
  if (p.uniform_halfwidth < 0.0) {
    throw std::invalid_argument("uniform_halfwidth must be >= 0");
  }
  const int M = base.topology.num_products;
  const int T = base.topology.num_periods;

  // Noise field: per-(i,t) Gaussian parameters, a function of seed and shape
  // only so every instance derived from this topology sees the same field.
  Rng field_rng(p.seed ^ 0x9d5af0a1c2e3b4ULL);
  std::vector<std::vector<double>> mu(M, std::vector<double>(T));
  std::vector<std::vector<double>> sigma(M, std::vector<double>(T));
  for (int i = 0; i < M; ++i) {
    for (int t = 0; t < T; ++t) {
      mu[i][t] = p.gauss_mean_scale * field_rng.normal();
      sigma[i][t] = p.gauss_sd_scale * std::abs(field_rng.normal());
    }
  }

  Rng rng(p.seed);
  ScpInstance out = base;
  for (int i = 0; i < M; ++i) {
    for (int t = 0; t < T; ++t) {
      const double eps = rng.normal(mu[i][t], sigma[i][t]);
      const double eps_u =
          rng.uniform(-p.uniform_halfwidth, p.uniform_halfwidth);
      const double d = static_cast<double>(base.demand[i][t]);
      const double shifted =
          p.multiplicative_uniform ? d + eps + eps_u * d : d + eps + eps_u;
      out.demand[i][t] =
          static_cast<int>(std::max(0.0, std::round(shifted)));
    }
  }
  return out;
}

std::vector<ScpInstance> generate_snapshots(const ScpTopology& topology,
                                            int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  const int M = topology.num_products;
  const int N = topology.num_parts;
  const int T = topology.num_periods;
  const int R = static_cast<int>(topology.cap_groups.size());

  Rng rng(seed);

  // Per-product base curve parameters, shared by all snapshots. Each
  // product is live only inside its own window of periods; outside it the
  // demand is exactly zero, which is what makes fix-at-zero structure exist.
  std::vector<double> scale(M), phase(M), trend(M), season_amp(M);
  std::vector<int> win_start(M), win_end(M);
  for (int i = 0; i < M; ++i) {
    scale[i] = std::exp(rng.normal(1.8, 0.5));  // log-normal, median ~6
    phase[i] = rng.uniform();
    trend[i] = rng.uniform(-0.3, 0.5);
    season_amp[i] = rng.uniform(0.15, 0.45);
    const int len = 1 + static_cast<int>(rng.uniform_int(
                            static_cast<std::size_t>(std::max(1, T / 2 + 1))));
    win_start[i] = static_cast<int>(
        rng.uniform_int(static_cast<std::size_t>(T)));
    win_end[i] = std::min(T, win_start[i] + len);
  }

  // Costs shared across snapshots.
  std::vector<std::vector<double>> inv_cost(N, std::vector<double>(T));
  std::vector<std::vector<double>> prod_cost(N, std::vector<double>(T));
  std::vector<std::vector<double>> unmet_penalty(M, std::vector<double>(T));
  for (int j = 0; j < N; ++j) {
    const double a = rng.uniform(0.5, 2.0);
    const double b = rng.uniform(1.0, 4.0);
    for (int t = 0; t < T; ++t) {
      inv_cost[j][t] = a * (1.0 + 0.1 * rng.uniform());
      prod_cost[j][t] = b * (1.0 + 0.1 * rng.uniform());
    }
  }
  for (int i = 0; i < M; ++i) {
    const double d = rng.uniform(8.0, 20.0);
    for (int t = 0; t < T; ++t) unmet_penalty[i][t] = d;
  }

  std::vector<ScpInstance> snapshots;
  snapshots.reserve(count);
  for (int s = 0; s < count; ++s) {
    Rng snap_rng = Rng(seed).split(s + 1);
    ScpInstance inst;
    inst.name = "snapshot-" + std::to_string(s);
    inst.topology = topology;
    inst.inv_cost = inv_cost;
    inst.prod_cost = prod_cost;
    inst.unmet_penalty = unmet_penalty;
    inst.demand.assign(M, std::vector<int>(T, 0));
    const double year_pos = static_cast<double>(s) / count;
    for (int i = 0; i < M; ++i) {
      for (int t = 0; t < T; ++t) {
        const double horizon_pos = T > 1 ? static_cast<double>(t) / (T - 1)
                                         : 0.0;
        if (t < win_start[i] || t >= win_end[i]) continue;
        const double cycle = year_pos + horizon_pos + phase[i];
        double d = scale[i] *
                   (1.0 + season_amp[i] *
                              std::sin(2.0 * std::numbers::pi * cycle) +
                    trend[i] * horizon_pos);
        d *= 1.0 + 0.1 * snap_rng.normal();
        inst.demand[i][t] = static_cast<int>(std::max(0.0, std::round(d)));
      }
    }
    // Capacity at ~70% of the demand the resource's parts could be asked to
    // serve, so capacity binds on high-demand instances.
    inst.capacity.assign(R, std::vector<double>(T, 0.0));
    for (int m = 0; m < R; ++m) {
      std::vector<char> product_seen(M, 0);
      for (int j : topology.cap_groups[m]) {
        for (int i : topology.satisfies[j]) product_seen[i] = 1;
      }
      for (int t = 0; t < T; ++t) {
        double load = 0.0;
        for (int i = 0; i < M; ++i) {
          if (product_seen[i]) load += inst.demand[i][t];
        }
        inst.capacity[m][t] = std::floor(0.7 * load) + 1.0;
      }
    }
    snapshots.push_back(std::move(inst));
  }
  return snapshots;
}

DemandStats demand_stats(const std::vector<ScpInstance>& instances) {
  DemandStats stats;
  if (instances.empty()) return stats;
  std::vector<double> means;
  for (const ScpInstance& inst : instances) {
    double sum = 0.0;
    int n = 0;
    for (const auto& row : inst.demand) {
      for (int d : row) {
        sum += d;
        ++n;
        stats.max_demand = std::max(stats.max_demand, static_cast<double>(d));
      }
    }
    means.push_back(n > 0 ? sum / n : 0.0);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= means.size();
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  stats.mean_of_means = mean;
  stats.sd_of_means = means.size() > 1
                          ? std::sqrt(var / (means.size() - 1))
                          : 0.0;
  return stats;
}

nlohmann::ordered_json scp_to_json(const ScpInstance& inst) {
  nlohmann::ordered_json j;
  j["name"] = inst.name;
  j["M"] = inst.topology.num_products;
  j["N"] = inst.topology.num_parts;
  j["T"] = inst.topology.num_periods;
  j["satisfies"] = inst.topology.satisfies;
  j["cap_groups"] = inst.topology.cap_groups;
  j["initial_inventory"] = inst.topology.initial_inventory;
  j["demand"] = inst.demand;
  j["capacity"] = inst.capacity;
  j["inv_cost"] = inst.inv_cost;
  j["prod_cost"] = inst.prod_cost;
  j["unmet_penalty"] = inst.unmet_penalty;
  return j;
}

ScpInstance scp_from_json(const nlohmann::json& j) {
  ScpInstance inst;
  inst.name = j.value("name", "");
  inst.topology.num_products = j.at("M").get<int>();
  inst.topology.num_parts = j.at("N").get<int>();
  inst.topology.num_periods = j.at("T").get<int>();
  inst.topology.satisfies =
      j.at("satisfies").get<std::vector<std::vector<int>>>();
  inst.topology.cap_groups =
      j.at("cap_groups").get<std::vector<std::vector<int>>>();
  inst.topology.initial_inventory =
      j.at("initial_inventory").get<std::vector<double>>();
  inst.demand = j.at("demand").get<std::vector<std::vector<int>>>();
  inst.capacity = j.at("capacity").get<std::vector<std::vector<double>>>();
  inst.inv_cost = j.at("inv_cost").get<std::vector<std::vector<double>>>();
  inst.prod_cost = j.at("prod_cost").get<std::vector<std::vector<double>>>();
  inst.unmet_penalty =
      j.at("unmet_penalty").get<std::vector<std::vector<double>>>();
  return inst;
}

std::string demand_csv(const ScpInstance& inst) {
  std::ostringstream out;
  out << "product";
  for (int t = 0; t < inst.topology.num_periods; ++t) out << ",t" << t;
  out << "\n";
  for (int i = 0; i < inst.topology.num_products; ++i) {
    out << i;
    for (int t = 0; t < inst.topology.num_periods; ++t) {
      out << "," << inst.demand[i][t];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace propel
