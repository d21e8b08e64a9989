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

#ifndef PROPEL_DRL_H_
#define PROPEL_DRL_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "propel/learn.hpp"
#include "propel/mlp.hpp"
#include "propel/scp.hpp"
#include "propel/solve.hpp"

namespace propel {

// Fixed variables split into contiguous period segments; segment widths are
// balanced with the remainder going to the earliest segments.
struct Partition {
  int m = 0;
  std::vector<std::pair<int, int>> segments;        // [start, end) periods
  std::vector<std::vector<std::string>> subsets;    // var names per segment
};

std::vector<int> parse_periods(const FixSet& fix);

Partition partition_fix_set(const FixSet& fix, int m,
                            const std::vector<int>& var_periods,
                            int num_periods);

// Decision state: which subsets were released back into the model (I) and
// which were ruled out (E). Solve results are cached on the state.
struct RlState {
  std::vector<int> inserted;  // sorted
  std::vector<int> excluded;  // sorted
  double cached_gap = 1.0;
  double cached_objective = 0.0;
  bool has_incumbent = false;
};

struct Action {
  int subset = 0;
  bool insert = true;
};

// Subsets still undecided in `s`.
std::vector<int> available_subsets(const RlState& s, int m);

// Pure transition; cached solve fields are reset on the result.
RlState transition(const RlState& s, const Action& a, int m);

// Reduced MIP keeping only FixSet \ (inserted subsets) clamped.
MipInstance state_mip(const RlState& s, const FixSet& fix, const Partition& p,
                      const MipInstance& base);

// Membership flags for I and E (2m), normalized per-subset fixed counts (m),
// normalized per-segment demand (m), cached gap (1).
std::vector<double> encode_state(const RlState& s, const ScpInstance& inst,
                                 const Partition& p);

struct RewardOptions {
  bool raw = false;        // skip the 1/|LP*| scaling
  bool gap_based = false;  // reward = -gap instead of scaled objective
};

// Higher is better for both senses; no incumbent yields -1.
double reward(const RlState& s_next, double lp_star, Sense sense,
              const RewardOptions& opts = {});

struct QNet {
  Mlp net;
  int m = 0;
  int encoding_version = 1;

  double q(const std::vector<double>& s_enc, const Action& a) const;
  nlohmann::ordered_json to_json() const;
  static QNet from_json(const nlohmann::json& j);
};

// Two hidden layers of 128 units; output holds (insert, exclude) values per
// subset.
QNet make_qnet(int input_dim, int m, Rng& rng);

struct RlHyper {
  double gamma = 0.99;
  double alpha = 0.1;  // exploration rate
  double lr = 0.001;
  int t_max = 4;
  double eps_tolerance = 0.01;
  double step_time_limit = 100.0;
  int episodes = 50;
  int m = 8;
  std::uint64_t seed = 0;
  RewardOptions reward_opts;
};

struct RlTransition {
  std::vector<double> s_enc;
  Action a;
  double r = 0.0;
  std::vector<double> s_next_enc;
  std::vector<int> next_avail;
  bool final = false;
};

// One full-pass regression step on the squared Bellman residual. Targets use
// a parameter snapshot frozen at entry: y = r for final states, else
// r + gamma * max over available next actions. Returns the mean loss before
// the step.
double learn_step(QNet& qnet, const std::vector<RlTransition>& buffer,
                  const RlHyper& hyper, Adam& opt);

// Episode rollouts with epsilon-greedy actions over instances whose reduced
// model misses the tolerance; one learn_step per episode.
QNet train_rl(const std::vector<ScpInstance>& instances,
              const FixModelSet& models, const RlHyper& hyper,
              const SolveLimits& lim, std::string* log_csv = nullptr);

// Insert-subsets whose insert value beats their exclude value.
std::vector<int> macro_action(const QNet& qnet,
                              const std::vector<double>& s_enc,
                              const std::vector<int>& avail);

struct InferResult {
  MipResult result;
  int steps = 0;
  std::vector<int> inserted;
  double lp_star = 0.0;
  int n_fixed_initial = 0;
};

// Macro-action inference starting from the fixed-set solve, warm starting
// every step with the best incumbent so far and returning the best state
// visited. `prop` is the already-computed reduced-model result.
InferResult infer(const ScpInstance& inst, const MipInstance& mip,
                  const FixSet& fix, const MipResult& prop, double lp_star,
                  const QNet& qnet, const RlHyper& hyper,
                  const SolveLimits& lim);

}  // namespace propel

#endif  // PROPEL_DRL_H_
