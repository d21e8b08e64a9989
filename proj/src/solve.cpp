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

#include "propel/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "propel/io.hpp"
#include "propel/mps.hpp"

namespace propel {

namespace {

double objective_of(const MipInstance& mip, const std::vector<double>& x) {
  double obj = 0.0;
  for (int j = 0; j < mip.num_vars(); ++j) obj += mip.vars[j].obj_coeff * x[j];
  return obj;
}

bool is_integral(double v) {
  return std::abs(v - std::round(v)) <= kIntegralityTol;
}

struct Node {
  double bound;        // LP bound in minimization key
  std::int64_t id;     // creation order, for deterministic tie-breaking
  std::vector<double> lb, ub;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

}  // namespace

MipResult solve_mip(const MipInstance& mip, const SolveLimits& lim,
                    const std::optional<WarmStart>& warm_start) {
  if (lim.time_limit <= 0.0 || lim.rel_gap < 0.0 || lim.rel_gap >= 1.0) {
    throw std::invalid_argument("bad solve limits");
  }
  const LpSolver solver(mip);
  const int n = mip.num_vars();
  const double sense_mult = mip.sense == Sense::kMaximize ? -1.0 : 1.0;

  MipResult result;
  const auto t_start = std::chrono::steady_clock::now();
  auto now = [&]() -> double {
    if (lim.deterministic_clock) return static_cast<double>(result.node_count);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };
  auto out_of_budget = [&]() {
    if (now() >= lim.time_limit) return true;
    return lim.node_limit && result.node_count >= *lim.node_limit;
  };

  double incumbent_key = kInfinity;  // minimization key of best solution
  auto try_incumbent = [&](const std::vector<double>& x) {
    std::vector<double> rounded = x;
    for (int j = 0; j < n; ++j) {
      if (mip.vars[j].is_integer) rounded[j] = std::round(rounded[j]);
    }
    const double obj = objective_of(mip, rounded);
    const double key = sense_mult * obj;
    if (key < incumbent_key - 1e-9) {
      incumbent_key = key;
      result.best_solution = std::move(rounded);
      result.best_objective = obj;
      result.trace.emplace_back(now(), obj);
    }
  };

  if (warm_start) {
    if (static_cast<int>(warm_start->solution.size()) != n) {
      throw std::invalid_argument("warm start has wrong dimension");
    }
    try_incumbent(warm_start->solution);
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t next_id = 0;

  std::vector<double> root_lb(n), root_ub(n);
  for (int j = 0; j < n; ++j) {
    root_lb[j] = mip.vars[j].lb;
    root_ub[j] = mip.vars[j].ub;
    if (mip.vars[j].is_integer) {
      root_lb[j] = std::ceil(root_lb[j] - kIntegralityTol);
      if (root_ub[j] != kInfinity) {
        root_ub[j] = std::floor(root_ub[j] + kIntegralityTol);
      }
    }
  }
  open.push(Node{-kInfinity, next_id++, std::move(root_lb),
                 std::move(root_ub)});

  double best_open_bound = -kInfinity;  // dual bound of the tree
  bool ever_lp_feasible = false;
  bool stopped_by_limit = false;

  auto gap_closed = [&]() {
    if (incumbent_key == kInfinity) return false;
    const double gap = incumbent_key - best_open_bound;
    return gap <= lim.rel_gap * std::max(std::abs(incumbent_key), 1e-10) + 1e-9;
  };

  while (!open.empty()) {
    // Global dual bound: weakest of all open nodes.
    best_open_bound = open.top().bound;
    if (gap_closed()) break;
    if (out_of_budget()) {
      stopped_by_limit = true;
      break;
    }

    Node node = open.top();
    open.pop();

    // Depth-first plunge: follow one child until the dive dies out.
    bool diving = true;
    while (diving) {
      if (out_of_budget()) {
        stopped_by_limit = true;
        // The plunge node's bound still counts toward the dual bound.
        best_open_bound = std::min(best_open_bound, node.bound);
        break;
      }
      ++result.node_count;
      const LpSolution lp = solver.solve(node.lb, node.ub);
      if (lp.status == LpStatus::kInfeasible) break;
      if (lp.status == LpStatus::kUnbounded) {
        // An unbounded relaxation at the root means the MIP itself is
        // unbounded; treat as an error, the case study never produces it.
        throw std::runtime_error("LP relaxation unbounded");
      }
      if (lp.status == LpStatus::kIterLimit) break;  // numerical bail-out
      ever_lp_feasible = true;
      const double key = sense_mult * lp.objective;
      if (key >= incumbent_key - 1e-9) break;  // dominated

      int branch_var = -1;
      double best_frac = kIntegralityTol;
      for (int j = 0; j < n; ++j) {
        if (!mip.vars[j].is_integer) continue;
        const double frac = std::abs(lp.primal[j] - std::round(lp.primal[j]));
        if (frac > best_frac) {
          best_frac = frac;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        try_incumbent(lp.primal);
        break;
      }

      const double v = lp.primal[branch_var];
      Node up = node;
      up.lb[branch_var] = std::ceil(v);
      up.bound = key;
      up.id = next_id++;
      Node down = std::move(node);
      down.ub[branch_var] = std::floor(v);
      down.bound = key;
      down.id = next_id++;
      // Plunge into the down child (SCP costs reward producing less), queue
      // the sibling.
      open.push(std::move(up));
      node = std::move(down);
    }
    if (stopped_by_limit) break;
  }

  if (!open.empty() && !stopped_by_limit) {
    best_open_bound = open.top().bound;
  } else if (open.empty()) {
    best_open_bound = incumbent_key;
  }

  if (incumbent_key == kInfinity) {
    if (stopped_by_limit) {
      result.status = MipStatus::kTimeLimit;
      result.bound = sense_mult * best_open_bound;
    } else {
      result.status = MipStatus::kInfeasible;
      result.bound = sense_mult * kInfinity;
      (void)ever_lp_feasible;
    }
    return result;
  }

  result.bound = sense_mult * std::min(best_open_bound, incumbent_key);
  if (stopped_by_limit && !gap_closed()) {
    result.status = MipStatus::kTimeLimit;
  } else {
    result.status = MipStatus::kOptimal;
  }
  return result;
}

MipResult brute_force(const MipInstance& mip, std::int64_t max_enum) {
  ValidationReport report = validate(mip);
  if (!report.ok()) {
    throw std::invalid_argument("invalid instance: " + report.violations[0]);
  }
  const int n = mip.num_vars();
  std::vector<int> int_vars;
  double combos = 1.0;
  for (int j = 0; j < n; ++j) {
    const Variable& v = mip.vars[j];
    if (!v.is_integer) continue;
    const double lo = std::ceil(v.lb - kIntegralityTol);
    const double hi = std::floor(v.ub + kIntegralityTol);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("unbounded integer variable '" + v.name +
                                  "' cannot be enumerated");
    }
    if (hi < lo) {
      MipResult r;
      r.status = MipStatus::kInfeasible;
      return r;
    }
    combos *= hi - lo + 1.0;
    int_vars.push_back(j);
  }
  if (combos > static_cast<double>(max_enum)) {
    throw std::invalid_argument("enumeration budget exceeded: " +
                                std::to_string(combos) + " assignments");
  }

  const LpSolver solver(mip);
  const double sense_mult = mip.sense == Sense::kMaximize ? -1.0 : 1.0;
  std::vector<double> lb(n), ub(n);
  for (int j = 0; j < n; ++j) {
    lb[j] = mip.vars[j].lb;
    ub[j] = mip.vars[j].ub;
  }

  MipResult result;
  result.status = MipStatus::kInfeasible;
  double best_key = kInfinity;

  std::vector<double> assign(int_vars.size());
  for (size_t k = 0; k < int_vars.size(); ++k) {
    assign[k] = std::ceil(mip.vars[int_vars[k]].lb - kIntegralityTol);
  }
  bool done = false;
  while (!done) {
    for (size_t k = 0; k < int_vars.size(); ++k) {
      lb[int_vars[k]] = ub[int_vars[k]] = assign[k];
    }
    const LpSolution lp = solver.solve(lb, ub);
    ++result.node_count;
    if (lp.status == LpStatus::kUnbounded) {
      throw std::runtime_error("LP relaxation unbounded under enumeration");
    }
    if (lp.status == LpStatus::kOptimal) {
      const double key = sense_mult * lp.objective;
      if (key < best_key) {
        best_key = key;
        result.status = MipStatus::kOptimal;
        result.best_solution = lp.primal;
        for (size_t k = 0; k < int_vars.size(); ++k) {
          result.best_solution[int_vars[k]] = assign[k];
        }
        result.best_objective = objective_of(mip, result.best_solution);
      }
    }
    // Odometer step.
    done = true;
    for (size_t k = 0; k < int_vars.size(); ++k) {
      const double hi =
          std::floor(mip.vars[int_vars[k]].ub + kIntegralityTol);
      if (assign[k] + 1.0 <= hi) {
        assign[k] += 1.0;
        for (size_t l = 0; l < k; ++l) {
          assign[l] = std::ceil(mip.vars[int_vars[l]].lb - kIntegralityTol);
        }
        done = false;
        break;
      }
    }
    if (int_vars.empty()) break;
  }

  if (result.status == MipStatus::kOptimal) {
    result.bound = result.best_objective;
    result.trace.emplace_back(0.0, result.best_objective);
  }
  return result;
}

std::string format_solution_file(const MipInstance& mip,
                                 const MipResult& res) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", res.best_objective);
  out << "=obj= " << buf << "\n";
  for (int j = 0; j < mip.num_vars(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", res.best_solution[j]);
    out << mip.vars[j].name << " " << buf << "\n";
  }
  return out.str();
}

MipResult parse_solution_file(const MipInstance& mip,
                              const std::string& text) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < mip.num_vars(); ++j) index[mip.vars[j].name] = j;

  MipResult res;
  res.best_solution.assign(mip.num_vars(), 0.0);
  bool saw_obj = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    if (name == "=infeasible=") {
      res.status = MipStatus::kInfeasible;
      return res;
    }
    double value;
    if (!(ls >> value)) {
      throw ExternalSolveError("unparsable solution line: " + line);
    }
    if (name == "=obj=") {
      res.best_objective = value;
      saw_obj = true;
      continue;
    }
    auto it = index.find(name);
    if (it == index.end()) {
      throw ExternalSolveError("solution references unknown variable '" +
                               name + "'");
    }
    res.best_solution[it->second] = value;
  }
  if (!saw_obj) throw ExternalSolveError("solution file has no =obj= line");
  res.status = MipStatus::kFeasible;
  res.bound = res.best_objective;
  return res;
}

MipResult external_solve(const MipInstance& mip,
                         const std::string& cmd_template,
                         const SolveLimits& lim) {
  namespace fs = std::filesystem;
  if (cmd_template.find("{in}") == std::string::npos ||
      cmd_template.find("{out}") == std::string::npos) {
    throw ExternalSolveError("command template must contain {in} and {out}");
  }

  const fs::path dir =
      fs::temp_directory_path() /
      ("propel-ext-" + std::to_string(
                           std::chrono::steady_clock::now().time_since_epoch()
                               .count()));
  fs::create_directories(dir);
  const fs::path in_path = dir / "model.mps";
  const fs::path out_path = dir / "model.sol";
  write_text_file(in_path, export_mps(mip));

  std::string cmd = cmd_template;
  auto replace_all = [&cmd](const std::string& from, const std::string& to) {
    for (size_t pos = 0; (pos = cmd.find(from, pos)) != std::string::npos;
         pos += to.size()) {
      cmd.replace(pos, from.size(), to);
    }
  };
  replace_all("{in}", in_path.string());
  replace_all("{out}", out_path.string());
  replace_all("{timelimit}", std::to_string(lim.time_limit));

  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (rc != 0) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw ExternalSolveError("external solver exited with status " +
                             std::to_string(rc));
  }
  if (!fs::exists(out_path)) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw ExternalSolveError("external solver produced no output file");
  }
  MipResult res = parse_solution_file(mip, read_text_file(out_path));
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (res.status != MipStatus::kInfeasible) {
    res.trace.emplace_back(elapsed, res.best_objective);
  }
  return res;
}

}  // namespace propel
