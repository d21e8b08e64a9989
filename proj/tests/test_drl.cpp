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

#include <algorithm>
#include <set>

#include "propel/drl.hpp"
#include "propel/io.hpp"
#include "propel/rng.hpp"
#include "test_util.hpp"

namespace propel {
namespace {

SolveLimits exact_limits() {
  SolveLimits lim;
  lim.rel_gap = 0.0;
  lim.deterministic_clock = true;
  return lim;
}

FixSet fix_with_periods(const std::vector<int>& periods) {
  FixSet fix;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    fix.var_names.push_back("z[" + std::to_string(k) + "," +
                            std::to_string(periods[k]) + "]");
  }
  return fix;
}

// Three-period micro family where fixed production variables have visible
// cost consequences per period.
ScpInstance three_period_scp() {
  ScpInstance inst = testutil::micro_scp();
  inst.topology.num_periods = 3;
  inst.demand = {{2, 1, 2}};
  inst.capacity = {{3.0, 3.0, 3.0}};
  inst.inv_cost = {{1.0, 1.0, 1.0}};
  inst.prod_cost = {{1.0, 1.0, 1.0}};
  inst.unmet_penalty = {{10.0, 10.0, 10.0}};
  return inst;
}

}  // namespace

TEST_CASE("periods parse from structured variable names") {
  const FixSet fix = fix_with_periods({0, 3, 12});
  CHECK(parse_periods(fix) == std::vector<int>{0, 3, 12});
}

TEST_CASE("partition balances contiguous segments, remainder first") {
  const FixSet fix = fix_with_periods({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Partition p = partition_fix_set(fix, 8, parse_periods(fix), 10);
  REQUIRE(p.segments.size() == 8);
  // 10 periods over 8 segments: the two earliest segments get width 2.
  CHECK(p.segments[0] == std::pair<int, int>{0, 2});
  CHECK(p.segments[1] == std::pair<int, int>{2, 4});
  CHECK(p.segments[2] == std::pair<int, int>{4, 5});
  CHECK(p.segments[7] == std::pair<int, int>{9, 10});
  CHECK(p.subsets[0].size() == 2);
  CHECK(p.subsets[7].size() == 1);
  // Every fixed variable lands in exactly one subset.
  std::size_t total = 0;
  for (const auto& sub : p.subsets) total += sub.size();
  CHECK(total == fix.var_names.size());
}

TEST_CASE("partition with as many segments as periods is the identity") {
  const FixSet fix = fix_with_periods({0, 1, 1, 2});
  const Partition p = partition_fix_set(fix, 3, parse_periods(fix), 3);
  CHECK(p.subsets[0] == std::vector<std::string>{"z[0,0]"});
  REQUIRE(p.subsets[1].size() == 2);
  CHECK(p.subsets[2] == std::vector<std::string>{"z[3,2]"});
}

TEST_CASE("transitions decide each subset exactly once") {
  RlState s;
  s.cached_gap = 0.4;
  const RlState s1 = transition(s, {2, true}, 4);
  CHECK(s1.inserted == std::vector<int>{2});
  CHECK(s1.cached_gap == 1.0);  // cache reset, state needs a fresh solve
  const RlState s2 = transition(s1, {0, false}, 4);
  CHECK(s2.excluded == std::vector<int>{0});
  CHECK(available_subsets(s2, 4) == std::vector<int>{1, 3});
  CHECK_THROWS_AS((void)transition(s2, {2, false}, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)transition(s2, {0, true}, 4), std::invalid_argument);
  CHECK(available_subsets(RlState{}, 3).size() == 3);
}

TEST_CASE("state mip releases inserted subsets and nothing else") {
  const ScpInstance inst = three_period_scp();
  const MipInstance mip = build_scp_mip(inst);
  FixSet fix;
  fix.var_names = {"z[0,0]", "z[0,1]", "z[0,2]"};
  const Partition p = partition_fix_set(fix, 3, parse_periods(fix), 3);

  // Nothing inserted: identical to the plain reduced model.
  const RlState root;
  CHECK(mip_to_json(state_mip(root, fix, p, mip)) ==
        mip_to_json(build_reduced_mip(mip, fix)));

  // Everything inserted: the base model returns.
  RlState all;
  all.inserted = {0, 1, 2};
  CHECK(mip_to_json(state_mip(all, fix, p, mip)) == mip_to_json(mip));

  // Partial insert frees exactly that segment's variables.
  RlState mid;
  mid.inserted = {1};
  const MipInstance released = state_mip(mid, fix, p, mip);
  for (const Variable& v : released.vars) {
    if (v.name == "z[0,1]") CHECK(v.ub > 0.0);
    if (v.name == "z[0,0]" || v.name == "z[0,2]") CHECK(v.ub == 0.0);
  }
}

TEST_CASE("state encoding lays out flags, sizes, demand, gap") {
  const ScpInstance inst = three_period_scp();
  FixSet fix;
  fix.var_names = {"z[0,0]", "z[0,1]", "z[0,2]"};
  const Partition p = partition_fix_set(fix, 3, parse_periods(fix), 3);
  RlState s;
  s.inserted = {0};
  s.excluded = {2};
  s.cached_gap = 0.25;
  const std::vector<double> enc = encode_state(s, inst, p);
  REQUIRE(enc.size() == 4 * 3 + 1);
  CHECK(enc[0] == 1.0);  // subset 0 inserted
  CHECK(enc[1] == 0.0);
  CHECK(enc[5] == 1.0);  // subset 2 excluded
  CHECK(enc[6] == doctest::Approx(1.0 / 3.0));  // one of three fixed vars
  // Segment demand shares: 2/5, 1/5, 2/5.
  CHECK(enc[9] == doctest::Approx(0.4));
  CHECK(enc[10] == doctest::Approx(0.2));
  CHECK(enc.back() == 0.25);
}

TEST_CASE("reward scales the objective and penalizes dead states") {
  RlState s;
  s.has_incumbent = false;
  CHECK(reward(s, 5.0, Sense::kMinimize) == -1.0);

  s.has_incumbent = true;
  s.cached_objective = 6.0;
  s.cached_gap = 0.3;
  CHECK(reward(s, 5.0, Sense::kMinimize) == doctest::Approx(-1.2));
  CHECK(reward(s, 5.0, Sense::kMaximize) == doctest::Approx(1.2));
  RewardOptions raw;
  raw.raw = true;
  CHECK(reward(s, 5.0, Sense::kMinimize, raw) == doctest::Approx(-6.0));
  RewardOptions gap;
  gap.gap_based = true;
  CHECK(reward(s, 5.0, Sense::kMinimize, gap) == doctest::Approx(-0.3));
}

TEST_CASE("value regression hits the target of a final transition") {
  Rng rng(71);
  QNet qnet = make_qnet(9, 2, rng);
  RlHyper hyper;
  hyper.lr = 0.01;
  const std::vector<double> s_enc(9, 0.5);
  RlTransition tr;
  tr.s_enc = s_enc;
  tr.a = {1, true};
  tr.r = 0.75;
  tr.final = true;
  Adam opt(qnet.net.num_params(), hyper.lr);
  double first_loss = 0.0;
  double last_loss = 0.0;
  for (int it = 0; it < 400; ++it) {
    last_loss = learn_step(qnet, {tr}, hyper, opt);
    if (it == 0) first_loss = last_loss;
  }
  CHECK(last_loss < first_loss);
  CHECK(qnet.q(s_enc, tr.a) == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("bootstrapped targets honor gamma") {
  Rng rng(72);
  QNet qnet = make_qnet(5, 2, rng);
  RlHyper hyper;
  hyper.lr = 0.01;
  hyper.gamma = 0.0;  // bootstrapping off: target is the raw reward
  RlTransition tr;
  tr.s_enc = {0.1, 0.2, 0.3, 0.4, 0.5};
  tr.a = {0, false};
  tr.r = -0.5;
  tr.s_next_enc = {0.5, 0.4, 0.3, 0.2, 0.1};
  tr.next_avail = {1};
  tr.final = false;
  Adam opt(qnet.net.num_params(), hyper.lr);
  for (int it = 0; it < 400; ++it) learn_step(qnet, {tr}, hyper, opt);
  CHECK(qnet.q(tr.s_enc, tr.a) == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("macro action is exactly the argmax-insert set") {
  Rng rng(73);
  const QNet qnet = make_qnet(13, 3, rng);
  const std::vector<double> s_enc = {0.2, 0.1, 0.0, 0.5, 0.4, 0.3, 0.6,
                                     0.7, 0.8, 0.9, 0.1, 0.2, 0.3};
  const std::vector<int> avail = {0, 2};
  const std::vector<int> chosen = macro_action(qnet, s_enc, avail);
  for (int k : avail) {
    const bool wants_insert =
        qnet.q(s_enc, {k, true}) >= qnet.q(s_enc, {k, false});
    const bool picked =
        std::find(chosen.begin(), chosen.end(), k) != chosen.end();
    CHECK(picked == wants_insert);
  }
  // Undecided subsets only.
  for (int k : chosen) CHECK((k == 0 || k == 2));
}

TEST_CASE("releasing more subsets never hurts the optimum") {
  Rng rng(74);
  int done = 0;
  while (done < 20) {
    const ScpInstance inst = testutil::random_micro_scp(rng);
    const MipInstance mip = build_scp_mip(inst);
    if (testutil::integer_domain_product(mip) > 2e4) continue;
    FixSet fix;
    for (const Variable& v : mip.vars) {
      if (v.is_integer) fix.var_names.push_back(v.name);
    }
    const int T = inst.topology.num_periods;
    const int m = std::min(2, T);
    const Partition p = partition_fix_set(fix, m, parse_periods(fix), T);

    RlState small, large;
    small.inserted = {0};
    large.inserted = m == 2 ? std::vector<int>{0, 1} : std::vector<int>{0};
    const MipResult a = brute_force(state_mip(small, fix, p, mip), 100000);
    const MipResult b = brute_force(state_mip(large, fix, p, mip), 100000);
    REQUIRE(a.has_solution());
    REQUIRE(b.has_solution());
    CHECK(b.best_objective <= a.best_objective + 1e-6);
    ++done;
  }
}

TEST_CASE("qnet serialization round trip") {
  Rng rng(75);
  const QNet qnet = make_qnet(13, 3, rng);
  const QNet back = QNet::from_json(qnet.to_json());
  CHECK(back.m == 3);
  CHECK(back.encoding_version == qnet.encoding_version);
  const std::vector<double> s(13, 0.3);
  CHECK(back.q(s, {1, true}) == qnet.q(s, {1, true}));
  CHECK(back.q(s, {2, false}) == qnet.q(s, {2, false}));
}

TEST_CASE("inference starts from the restricted result and only improves") {
  const ScpInstance inst = three_period_scp();
  const MipInstance mip = build_scp_mip(inst);
  FixSet fix;
  fix.var_names = {"z[0,0]", "z[0,1]", "z[0,2]"};
  const MipResult prop =
      solve_mip(build_reduced_mip(mip, fix), exact_limits());
  REQUIRE(prop.has_solution());
  const double lp_star = solve_lp(mip).objective;

  Rng rng(76);
  const QNet qnet = make_qnet(4 * 3 + 1, 3, rng);
  RlHyper hyper;
  hyper.m = 3;
  hyper.step_time_limit = 50.0;

  SUBCASE("zero steps returns the warm start itself") {
    RlHyper frozen = hyper;
    frozen.t_max = 0;
    const InferResult out =
        infer(inst, mip, fix, prop, lp_star, qnet, frozen, exact_limits());
    CHECK(out.steps == 0);
    CHECK(out.result.best_objective == doctest::Approx(prop.best_objective));
  }

  SUBCASE("best-so-far contract") {
    const InferResult out =
        infer(inst, mip, fix, prop, lp_star, qnet, hyper, exact_limits());
    CHECK(out.result.best_objective <= prop.best_objective + 1e-9);
    CHECK(out.n_fixed_initial == 3);
    CHECK(out.steps <= hyper.t_max);
  }
}

}  // namespace propel
