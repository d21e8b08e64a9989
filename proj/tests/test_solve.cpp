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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "propel/rng.hpp"
#include "propel/scp.hpp"
#include "propel/simplex.hpp"
#include "propel/solve.hpp"
#include "test_util.hpp"

namespace propel {
namespace {

MipInstance lp_example() {
  // max 3a + 2b s.t. a + b <= 4, a <= 2; optimum a=2, b=2, obj=10.
  MipInstance mip;
  mip.name = "lp";
  mip.sense = Sense::kMaximize;
  mip.vars.push_back({"a", 0.0, kInfinity, false, 3.0});
  mip.vars.push_back({"b", 0.0, kInfinity, false, 2.0});
  Constraint c1;
  c1.name = "sum";
  c1.terms = {{0, 1.0}, {1, 1.0}};
  c1.sense = RowSense::kLessEqual;
  c1.rhs = 4.0;
  Constraint c2;
  c2.name = "cap_a";
  c2.terms = {{0, 1.0}};
  c2.sense = RowSense::kLessEqual;
  c2.rhs = 2.0;
  mip.cons = {c1, c2};
  return mip;
}

MipInstance knapsack() {
  // max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, binaries; optimum a=b=1, obj 9.
  MipInstance mip;
  mip.name = "knap";
  mip.sense = Sense::kMaximize;
  mip.vars.push_back({"a", 0.0, 1.0, true, 5.0});
  mip.vars.push_back({"b", 0.0, 1.0, true, 4.0});
  mip.vars.push_back({"c", 0.0, 1.0, true, 3.0});
  Constraint c;
  c.name = "w";
  c.terms = {{0, 2.0}, {1, 3.0}, {2, 1.0}};
  c.sense = RowSense::kLessEqual;
  c.rhs = 5.0;
  mip.cons.push_back(c);
  return mip;
}

SolveLimits exact_limits() {
  SolveLimits lim;
  lim.rel_gap = 0.0;
  lim.deterministic_clock = true;
  return lim;
}

}  // namespace

TEST_CASE("simplex solves a small max lp") {
  const LpSolution sol = solve_lp(lp_example());
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(10.0));
  CHECK(sol.primal[0] == doctest::Approx(2.0));
  CHECK(sol.primal[1] == doctest::Approx(2.0));
}

TEST_CASE("simplex detects infeasibility") {
  MipInstance mip = lp_example();
  Constraint c;
  c.name = "impossible";
  c.terms = {{0, 1.0}, {1, 1.0}};
  c.sense = RowSense::kGreaterEqual;
  c.rhs = 100.0;
  mip.cons.push_back(c);
  CHECK(solve_lp(mip).status == LpStatus::kInfeasible);
}

TEST_CASE("simplex detects unboundedness") {
  MipInstance mip;
  mip.sense = Sense::kMaximize;
  mip.vars.push_back({"a", 0.0, kInfinity, false, 1.0});
  Constraint c;
  c.name = "floor";
  c.terms = {{0, 1.0}};
  c.sense = RowSense::kGreaterEqual;
  c.rhs = 1.0;
  mip.cons.push_back(c);
  CHECK(solve_lp(mip).status == LpStatus::kUnbounded);
}

TEST_CASE("simplex reduced costs vanish on basic columns") {
  const MipInstance mip = build_scp_mip(testutil::micro_scp());
  const LpSolution sol = solve_lp(mip);
  REQUIRE(sol.status == LpStatus::kOptimal);
  // Complementary slackness spot check: any variable strictly between its
  // bounds must have zero reduced cost.
  for (int i = 0; i < mip.num_vars(); ++i) {
    if (sol.primal[i] > mip.vars[i].lb + 1e-7 &&
        sol.primal[i] < mip.vars[i].ub - 1e-7) {
      CHECK(std::abs(sol.reduced_costs[i]) < 1e-6);
    }
  }
}

TEST_CASE("branch and bound solves the knapsack") {
  const MipResult res = solve_mip(knapsack(), exact_limits());
  REQUIRE(res.status == MipStatus::kOptimal);
  CHECK(res.best_objective == doctest::Approx(9.0));
  CHECK(res.best_solution[0] == doctest::Approx(1.0));
  CHECK(res.best_solution[1] == doctest::Approx(1.0));
  CHECK(res.best_solution[2] == doctest::Approx(0.0));
}

TEST_CASE("branch and bound solves the micro planning instance") {
  const MipResult res =
      solve_mip(build_scp_mip(testutil::micro_scp()), exact_limits());
  REQUIRE(res.status == MipStatus::kOptimal);
  CHECK(res.best_objective == doctest::Approx(12.0));
}

TEST_CASE("brute force agrees with branch and bound on random micros") {
  Rng rng(11);
  int done = 0;
  while (done < 20) {
    const ScpInstance inst = testutil::random_micro_scp(rng);
    const MipInstance mip = build_scp_mip(inst);
    if (testutil::integer_domain_product(mip) > 1e5) continue;
    const MipResult exact = brute_force(mip, 200000);
    const MipResult bb = solve_mip(mip, exact_limits());
    REQUIRE(exact.has_solution());
    REQUIRE(bb.has_solution());
    CHECK(bb.best_objective ==
          doctest::Approx(exact.best_objective).epsilon(1e-6));
    ++done;
  }
}

TEST_CASE("brute force rejects an oversized enumeration upfront") {
  MipInstance mip = knapsack();
  mip.vars[0].ub = 1e6;
  CHECK_THROWS_AS((void)brute_force(mip, 1000), std::invalid_argument);
}

TEST_CASE("incumbent trace improves monotonically") {
  const MipInstance mip = build_scp_mip(testutil::micro_scp());
  const MipResult res = solve_mip(mip, exact_limits());
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    CHECK(res.trace[k].first >= res.trace[k - 1].first);
    CHECK(res.trace[k].second < res.trace[k - 1].second);  // minimization
  }
  REQUIRE_FALSE(res.trace.empty());
  CHECK(res.trace.back().second == doctest::Approx(res.best_objective));
}

TEST_CASE("lp relaxation bounds the integer optimum") {
  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    const MipInstance mip = build_scp_mip(testutil::random_micro_scp(rng));
    const LpSolution lp = solve_lp(mip);
    const MipResult res = solve_mip(mip, exact_limits());
    REQUIRE(lp.status == LpStatus::kOptimal);
    REQUIRE(res.has_solution());
    CHECK(lp.objective <= res.best_objective + 1e-6);
    CHECK(res.bound <= res.best_objective + 1e-6);
  }
}

TEST_CASE("solves are deterministic") {
  Rng rng(13);
  const MipInstance mip = build_scp_mip(testutil::random_micro_scp(rng));
  const MipResult a = solve_mip(mip, exact_limits());
  const MipResult b = solve_mip(mip, exact_limits());
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.node_count == b.node_count);
  CHECK(a.trace == b.trace);
  CHECK(a.best_solution == b.best_solution);
}

TEST_CASE("deterministic clock charges one tick per node") {
  const MipInstance mip = build_scp_mip(testutil::micro_scp());
  const MipResult res = solve_mip(mip, exact_limits());
  for (const auto& [t, obj] : res.trace) {
    CHECK(t <= static_cast<double>(res.node_count));
    CHECK(t >= 0.0);
  }
}

TEST_CASE("tick budget exhaustion reports a time limit") {
  SolveLimits lim = exact_limits();
  lim.time_limit = 1.0;
  MipInstance mip = knapsack();
  // Enough depth that one node cannot finish the search.
  for (int k = 0; k < 6; ++k) {
    mip.vars.push_back({"p" + std::to_string(k), 0.0, 1.0, true, 1.0});
    mip.cons[0].terms.push_back({3 + k, 2.0});
  }
  const MipResult res = solve_mip(mip, lim);
  CHECK(res.status == MipStatus::kTimeLimit);
  CHECK(res.node_count <= 2);
}

TEST_CASE("warm start acts as an initial incumbent") {
  const MipInstance mip = build_scp_mip(testutil::micro_scp());
  const MipResult cold = solve_mip(mip, exact_limits());
  REQUIRE(cold.status == MipStatus::kOptimal);

  WarmStart ws;
  ws.solution = cold.best_solution;
  ws.objective = cold.best_objective;
  SolveLimits lim = exact_limits();
  lim.node_limit = 0;  // no search at all; only the warm start survives
  const MipResult res = solve_mip(mip, lim, ws);
  REQUIRE(res.has_solution());
  CHECK(res.best_objective == doctest::Approx(cold.best_objective));

  // With search enabled the result can only improve on the warm start.
  const MipResult full = solve_mip(mip, exact_limits(), ws);
  CHECK(full.best_objective <= ws.objective + 1e-9);
}

TEST_CASE("solution file round trip") {
  const MipInstance mip = build_scp_mip(testutil::micro_scp());
  const MipResult res = solve_mip(mip, exact_limits());
  const std::string text = format_solution_file(mip, res);
  const MipResult back = parse_solution_file(mip, text);
  CHECK(back.best_objective == doctest::Approx(res.best_objective));
  REQUIRE(back.best_solution.size() == res.best_solution.size());
  for (std::size_t i = 0; i < res.best_solution.size(); ++i) {
    CHECK(back.best_solution[i] == doctest::Approx(res.best_solution[i]));
  }
}

}  // namespace propel
