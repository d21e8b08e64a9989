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

#include "propel/drl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "propel/metrics.hpp"

namespace propel {
namespace {

int parse_period(const std::string& name) {
  int a = -1;
  int b = -1;
  char role[8];
  if (std::sscanf(name.c_str(), "%7[a-z][%d,%d]", role, &a, &b) != 3 ||
      b < 0) {
    throw std::invalid_argument("cannot parse period from " + name);
  }
  return b;
}

void insert_sorted(std::vector<int>& v, int x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

bool contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

std::vector<int> parse_periods(const FixSet& fix) {
  std::vector<int> periods;
  periods.reserve(fix.var_names.size());
  for (const std::string& n : fix.var_names) periods.push_back(parse_period(n));
  return periods;
}

Partition partition_fix_set(const FixSet& fix, int m,
                            const std::vector<int>& var_periods,
                            int num_periods) {
  if (m < 1) throw std::invalid_argument("partition size must be >= 1");
  if (var_periods.size() != fix.var_names.size()) {
    throw std::invalid_argument("period vector does not match fix set");
  }
  Partition p;
  p.m = m;
  p.subsets.resize(static_cast<std::size_t>(m));
  // Balanced contiguous widths, remainder to the earliest segments.
  const int base = num_periods / m;
  const int extra = num_periods % m;
  int start = 0;
  for (int k = 0; k < m; ++k) {
    const int width = base + (k < extra ? 1 : 0);
    p.segments.emplace_back(start, start + width);
    start += width;
  }
  for (std::size_t i = 0; i < fix.var_names.size(); ++i) {
    const int t = var_periods[i];
    if (t < 0 || t >= num_periods) {
      throw std::invalid_argument("variable period outside horizon");
    }
    for (int k = 0; k < m; ++k) {
      if (t >= p.segments[k].first && t < p.segments[k].second) {
        p.subsets[k].push_back(fix.var_names[i]);
        break;
      }
    }
  }
  return p;
}

std::vector<int> available_subsets(const RlState& s, int m) {
  std::vector<int> avail;
  for (int k = 0; k < m; ++k) {
    if (!contains(s.inserted, k) && !contains(s.excluded, k)) {
      avail.push_back(k);
    }
  }
  return avail;
}

RlState transition(const RlState& s, const Action& a, int m) {
  if (a.subset < 0 || a.subset >= m || contains(s.inserted, a.subset) ||
      contains(s.excluded, a.subset)) {
    throw std::invalid_argument("action on a decided or unknown subset");
  }
  RlState next;
  next.inserted = s.inserted;
  next.excluded = s.excluded;
  if (a.insert) {
    insert_sorted(next.inserted, a.subset);
  } else {
    insert_sorted(next.excluded, a.subset);
  }
  return next;
}

MipInstance state_mip(const RlState& s, const FixSet& fix, const Partition& p,
                      const MipInstance& base) {
  FixSet remaining;
  for (const std::string& name : fix.var_names) {
    bool released = false;
    for (int k : s.inserted) {
      const auto& sub = p.subsets[static_cast<std::size_t>(k)];
      if (std::find(sub.begin(), sub.end(), name) != sub.end()) {
        released = true;
        break;
      }
    }
    if (!released) remaining.var_names.push_back(name);
  }
  return build_reduced_mip(base, remaining);
}

std::vector<double> encode_state(const RlState& s, const ScpInstance& inst,
                                 const Partition& p) {
  const int m = p.m;
  std::vector<double> enc;
  enc.reserve(static_cast<std::size_t>(4 * m + 1));
  for (int k = 0; k < m; ++k) enc.push_back(contains(s.inserted, k) ? 1.0 : 0.0);
  for (int k = 0; k < m; ++k) enc.push_back(contains(s.excluded, k) ? 1.0 : 0.0);
  std::size_t total_fixed = 0;
  for (const auto& sub : p.subsets) total_fixed += sub.size();
  for (int k = 0; k < m; ++k) {
    enc.push_back(static_cast<double>(p.subsets[k].size()) /
                  static_cast<double>(std::max<std::size_t>(1, total_fixed)));
  }
  double total_demand = 0.0;
  for (const auto& row : inst.demand) {
    for (int d : row) total_demand += d;
  }
  for (int k = 0; k < m; ++k) {
    double seg = 0.0;
    for (const auto& row : inst.demand) {
      for (int t = p.segments[k].first;
           t < p.segments[k].second && t < static_cast<int>(row.size()); ++t) {
        seg += row[t];
      }
    }
    enc.push_back(total_demand > 0.0 ? seg / total_demand : 0.0);
  }
  enc.push_back(s.cached_gap);
  return enc;
}

double reward(const RlState& s_next, double lp_star, Sense sense,
              const RewardOptions& opts) {
  if (!s_next.has_incumbent) return -1.0;
  if (opts.gap_based) return -s_next.cached_gap;
  double v = sense == Sense::kMinimize ? -s_next.cached_objective
                                       : s_next.cached_objective;
  if (!opts.raw && std::abs(lp_star) > 0.0) v /= std::abs(lp_star);
  return v;
}

double QNet::q(const std::vector<double>& s_enc, const Action& a) const {
  const std::vector<double> out = net.forward(s_enc);
  return out[static_cast<std::size_t>(2 * a.subset + (a.insert ? 0 : 1))];
}

nlohmann::ordered_json QNet::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "propel-qnet";
  j["version"] = 1;
  j["m"] = m;
  j["encoding_version"] = encoding_version;
  j["net"] = net.to_json();
  return j;
}

QNet QNet::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "propel-qnet" || j.value("version", 0) != 1) {
    throw std::runtime_error("unsupported q-net checkpoint format");
  }
  QNet q{Mlp::from_json(j.at("net")), j.at("m").get<int>(),
         j.at("encoding_version").get<int>()};
  return q;
}

QNet make_qnet(int input_dim, int m, Rng& rng) {
  return QNet{Mlp({input_dim, 128, 128, 2 * m}, rng), m, 1};
}

double learn_step(QNet& qnet, const std::vector<RlTransition>& buffer,
                  const RlHyper& hyper, Adam& opt) {
  if (buffer.empty()) throw std::invalid_argument("empty replay buffer");
  const Mlp frozen = qnet.net;  // target snapshot
  std::vector<double> grad(static_cast<std::size_t>(qnet.net.num_params()),
                           0.0);
  double loss = 0.0;
  for (const RlTransition& tr : buffer) {
    double y = tr.r;
    if (!tr.final && !tr.next_avail.empty()) {
      const std::vector<double> qn = frozen.forward(tr.s_next_enc);
      double best = -1e300;
      for (int k : tr.next_avail) {
        best = std::max(best, qn[static_cast<std::size_t>(2 * k)]);
        best = std::max(best, qn[static_cast<std::size_t>(2 * k + 1)]);
      }
      y += hyper.gamma * best;
    }
    Mlp::Cache cache;
    const std::vector<double> out = qnet.net.forward(tr.s_enc, &cache);
    const std::size_t ai =
        static_cast<std::size_t>(2 * tr.a.subset + (tr.a.insert ? 0 : 1));
    const double diff = out[ai] - y;
    loss += diff * diff;
    std::vector<double> dout(out.size(), 0.0);
    dout[ai] = 2.0 * diff;
    qnet.net.backward(cache, dout, &grad);
  }
  const double inv = 1.0 / static_cast<double>(buffer.size());
  for (double& g : grad) g *= inv;
  opt.step(qnet.net.mutable_params(), grad);
  return loss * inv;
}

namespace {

struct EpisodeContext {
  MipInstance mip;
  double lp_star = 0.0;
  FixSet fix;
  Partition partition;
  RlState s0;
};

RlState solve_state(const RlState& s, const EpisodeContext& ctx,
                    const SolveLimits& step_lim, Sense sense,
                    const std::optional<WarmStart>& warm, MipResult* out) {
  const MipInstance reduced = state_mip(s, ctx.fix, ctx.partition, ctx.mip);
  const MipResult res = solve_mip(reduced, step_lim, warm);
  RlState next = s;
  next.has_incumbent = res.has_solution();
  next.cached_objective = next.has_incumbent ? res.best_objective : 0.0;
  next.cached_gap = next.has_incumbent
                        ? primal_gap(res.best_objective, ctx.lp_star)
                        : 1.0;
  if (out) *out = res;
  (void)sense;
  return next;
}

}  // namespace

QNet train_rl(const std::vector<ScpInstance>& instances,
              const FixModelSet& models, const RlHyper& hyper,
              const SolveLimits& lim, std::string* log_csv) {
  if (instances.empty()) {
    throw std::invalid_argument("no RL training instances");
  }
  SolveLimits step_lim = lim;
  step_lim.time_limit = hyper.step_time_limit;

  std::vector<EpisodeContext> ctxs;
  for (const ScpInstance& inst : instances) {
    EpisodeContext ctx;
    ctx.mip = build_scp_mip(inst);
    const LpSolution lp = LpSolver(ctx.mip).solve();
    ctx.lp_star = lp.objective;
    ctx.fix = predict_fix_set(models, ctx.mip, inst, lp, true);
    ctx.partition = partition_fix_set(ctx.fix, hyper.m, parse_periods(ctx.fix),
                                      inst.topology.num_periods);
    ctx.s0 = solve_state(RlState{}, ctx, step_lim, ctx.mip.sense, std::nullopt,
                         nullptr);
    ctxs.push_back(std::move(ctx));
  }

  const int input_dim = 4 * hyper.m + 1;
  Rng init_rng(Rng(hyper.seed).split(7).next_u64());
  QNet qnet = make_qnet(input_dim, hyper.m, init_rng);
  Adam opt(qnet.net.num_params(), hyper.lr);

  std::deque<RlTransition> buffer;
  constexpr std::size_t kBufferCap = 10000;

  // Seed-shuffled instance cycle.
  std::vector<std::size_t> order(ctxs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng order_rng(Rng(hyper.seed).split(11).next_u64());
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[order_rng.uniform_int(i)]);
  }

  std::ostringstream log;
  log << "episode,step,action,subset,gap,reward\n";

  for (int ep = 0; ep < hyper.episodes; ++ep) {
    const EpisodeContext& ctx = ctxs[order[static_cast<std::size_t>(ep) %
                                           order.size()]];
    const ScpInstance& inst =
        instances[order[static_cast<std::size_t>(ep) % order.size()]];
    Rng rng(Rng(hyper.seed).split(1000 + static_cast<std::uint64_t>(ep))
                .next_u64());
    RlState s = ctx.s0;
    for (int step = 0; step < hyper.t_max; ++step) {
      if (s.cached_gap <= hyper.eps_tolerance) break;
      const std::vector<int> avail = available_subsets(s, hyper.m);
      if (avail.empty()) break;
      Action a;
      if (rng.uniform() < hyper.alpha) {
        const std::size_t pick = rng.uniform_int(avail.size() * 2);
        a = {avail[pick / 2], pick % 2 == 0};
      } else {
        const std::vector<double> enc = encode_state(s, inst, ctx.partition);
        const std::vector<double> out = qnet.net.forward(enc);
        double best = -1e300;
        for (int k : avail) {
          for (int ins = 0; ins < 2; ++ins) {
            const double v = out[static_cast<std::size_t>(2 * k + ins)];
            if (v > best) {
              best = v;
              a = {k, ins == 0};
            }
          }
        }
      }
      RlState moved = transition(s, a, hyper.m);
      const RlState s_next =
          solve_state(moved, ctx, step_lim, ctx.mip.sense, std::nullopt,
                      nullptr);
      const double r =
          reward(s_next, ctx.lp_star, ctx.mip.sense, hyper.reward_opts);
      RlTransition tr;
      tr.s_enc = encode_state(s, inst, ctx.partition);
      tr.a = a;
      tr.r = r;
      tr.s_next_enc = encode_state(s_next, inst, ctx.partition);
      tr.next_avail = available_subsets(s_next, hyper.m);
      tr.final = step + 1 == hyper.t_max || tr.next_avail.empty() ||
                 s_next.cached_gap <= hyper.eps_tolerance;
      if (buffer.size() == kBufferCap) buffer.pop_front();
      buffer.push_back(std::move(tr));
      log << ep << ',' << step << ',' << (a.insert ? "insert" : "exclude")
          << ',' << a.subset << ',' << s_next.cached_gap << ',' << r << '\n';
      s = s_next;
    }
    if (!buffer.empty()) {
      const std::vector<RlTransition> snapshot(buffer.begin(), buffer.end());
      learn_step(qnet, snapshot, hyper, opt);
    }
  }
  if (log_csv) *log_csv = log.str();
  return qnet;
}

std::vector<int> macro_action(const QNet& qnet,
                              const std::vector<double>& s_enc,
                              const std::vector<int>& avail) {
  const std::vector<double> out = qnet.net.forward(s_enc);
  std::vector<int> picked;
  for (int k : avail) {
    if (out[static_cast<std::size_t>(2 * k)] >=
        out[static_cast<std::size_t>(2 * k + 1)]) {
      picked.push_back(k);
    }
  }
  return picked;
}

InferResult infer(const ScpInstance& inst, const MipInstance& mip,
                  const FixSet& fix, const MipResult& prop, double lp_star,
                  const QNet& qnet, const RlHyper& hyper,
                  const SolveLimits& lim) {
  InferResult out;
  out.lp_star = lp_star;
  out.n_fixed_initial = static_cast<int>(fix.var_names.size());
  out.result = prop;

  EpisodeContext ctx;
  ctx.mip = mip;
  ctx.lp_star = lp_star;
  ctx.fix = fix;
  ctx.partition = partition_fix_set(fix, hyper.m, parse_periods(fix),
                                    inst.topology.num_periods);
  SolveLimits step_lim = lim;
  step_lim.time_limit = hyper.step_time_limit;

  RlState s;
  s.has_incumbent = prop.has_solution();
  s.cached_objective = s.has_incumbent ? prop.best_objective : 0.0;
  s.cached_gap =
      s.has_incumbent ? primal_gap(prop.best_objective, lp_star) : 1.0;

  const bool minimize = mip.sense == Sense::kMinimize;
  double best_obj = s.has_incumbent ? prop.best_objective
                                    : (minimize ? 1e300 : -1e300);
  std::vector<double> best_sol = prop.best_solution;
  double clock = prop.trace.empty() ? 0.0 : prop.trace.back().first;

  auto better = [minimize](double a, double b) {
    return minimize ? a < b : a > b;
  };

  for (int step = 0; step < hyper.t_max; ++step) {
    if (s.cached_gap <= hyper.eps_tolerance) break;
    const std::vector<int> avail = available_subsets(s, hyper.m);
    if (avail.empty()) break;
    const std::vector<double> enc = encode_state(s, inst, ctx.partition);
    std::vector<int> chosen = macro_action(qnet, enc, avail);
    if (chosen.empty()) {
      // Stall guard: release the single most promising subset.
      const std::vector<double> q = qnet.net.forward(enc);
      int best_k = avail.front();
      for (int k : avail) {
        if (q[static_cast<std::size_t>(2 * k)] >
            q[static_cast<std::size_t>(2 * best_k)]) {
          best_k = k;
        }
      }
      chosen = {best_k};
    }
    RlState moved = s;
    for (int k : chosen) moved = transition(moved, {k, true}, hyper.m);
    std::optional<WarmStart> warm;
    if (!best_sol.empty()) warm = WarmStart{best_sol, best_obj};
    MipResult res;
    const RlState s_next =
        solve_state(moved, ctx, step_lim, mip.sense, warm, &res);
    ++out.steps;
    for (const auto& [t, obj] : res.trace) {
      if (better(obj, best_obj) || best_sol.empty()) {
        out.result.trace.emplace_back(clock + t, obj);
      }
    }
    clock += lim.deterministic_clock ? static_cast<double>(res.node_count)
                                     : step_lim.time_limit;
    out.result.node_count += res.node_count;
    if (res.has_solution() &&
        (best_sol.empty() || better(res.best_objective, best_obj))) {
      best_obj = res.best_objective;
      best_sol = res.best_solution;
      out.result.best_objective = best_obj;
      out.result.best_solution = best_sol;
      if (out.result.status == MipStatus::kInfeasible) {
        out.result.status = MipStatus::kFeasible;
      }
    }
    s = s_next;
    s.cached_gap = best_sol.empty() ? 1.0 : primal_gap(best_obj, lp_star);
  }
  out.inserted = s.inserted;
  return out;
}

}  // namespace propel
