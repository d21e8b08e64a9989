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

#include "propel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "propel/drl.hpp"
#include "propel/features.hpp"
#include "propel/io.hpp"
#include "propel/learn.hpp"
#include "propel/metrics.hpp"
#include "propel/scp.hpp"
#include "propel/solve.hpp"

namespace fs = std::filesystem;

namespace propel {
namespace {

const char* const kKeys[] = {
    "products",      "parts",         "periods",         "snapshots",
    "scale",         "train_sl",      "train_rl",        "test",
    "test_extra",    "prop_budget",   "total_budget",    "step_budget",
    "deterministic_clock",            "rel_gap",         "tau",
    "lr",            "epochs",        "batch",           "grid_search",
    "shared_model",  "rc_sign_flip",  "weights_by_value", "m",
    "episodes",      "t_max",         "gamma",           "alpha",
    "rl_lr",         "raw_reward",    "reward",          "noise_mean",
    "noise_sd",      "noise_halfwidth",                  "absolute_noise",
    "seed",          "methods",       "out_dir",         "force",
};

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void apply_env_overrides(std::map<std::string, std::string>& kv) {
  for (const char* key : kKeys) {
    std::string env = "PROPEL_";
    for (const char* p = key; *p; ++p) {
      env += static_cast<char>(std::toupper(*p));
    }
    if (const char* v = std::getenv(env.c_str())) kv[key] = v;
  }
}

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "products") c.products = static_cast<int>(to_long(k, v));
    else if (k == "parts") c.parts = static_cast<int>(to_long(k, v));
    else if (k == "periods") c.periods = static_cast<int>(to_long(k, v));
    else if (k == "snapshots") c.snapshots = static_cast<int>(to_long(k, v));
    else if (k == "scale") c.scale = to_double(k, v);
    else if (k == "train_sl") c.train_sl = static_cast<int>(to_long(k, v));
    else if (k == "train_rl") c.train_rl = static_cast<int>(to_long(k, v));
    else if (k == "test") c.test = static_cast<int>(to_long(k, v));
    else if (k == "test_extra") c.test_extra = static_cast<int>(to_long(k, v));
    else if (k == "prop_budget") c.prop_budget = to_double(k, v);
    else if (k == "total_budget") c.total_budget = to_double(k, v);
    else if (k == "step_budget") c.step_budget = to_double(k, v);
    else if (k == "deterministic_clock") c.deterministic_clock = to_bool(k, v);
    else if (k == "rel_gap") c.rel_gap = to_double(k, v);
    else if (k == "tau") c.tau = to_double(k, v);
    else if (k == "lr") c.lr = to_double(k, v);
    else if (k == "epochs") c.epochs = static_cast<int>(to_long(k, v));
    else if (k == "batch") c.batch = static_cast<int>(to_long(k, v));
    else if (k == "grid_search") c.grid_search = to_bool(k, v);
    else if (k == "shared_model") c.shared_model = to_bool(k, v);
    else if (k == "rc_sign_flip") c.rc_sign_flip = to_bool(k, v);
    else if (k == "weights_by_value") c.weights_by_value = to_bool(k, v);
    else if (k == "m") c.m = static_cast<int>(to_long(k, v));
    else if (k == "episodes") c.episodes = static_cast<int>(to_long(k, v));
    else if (k == "t_max") c.t_max = static_cast<int>(to_long(k, v));
    else if (k == "gamma") c.gamma = to_double(k, v);
    else if (k == "alpha") c.alpha = to_double(k, v);
    else if (k == "rl_lr") c.rl_lr = to_double(k, v);
    else if (k == "raw_reward") c.raw_reward = to_bool(k, v);
    else if (k == "reward") c.reward = v;
    else if (k == "noise_mean") c.noise_mean = to_double(k, v);
    else if (k == "noise_sd") c.noise_sd = to_double(k, v);
    else if (k == "noise_halfwidth") c.noise_halfwidth = to_double(k, v);
    else if (k == "absolute_noise") c.absolute_noise = to_bool(k, v);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_long(k, v));
    else if (k == "methods") c.methods = v;
    else if (k == "out_dir") c.out_dir = v;
    else if (k == "force") c.force = to_bool(k, v);
    else throw ConfigError("unknown config key '" + k + "'");
  }
  if (c.scale <= 0.0) throw ConfigError("scale must be positive");
  if (c.prop_budget <= 0.0 || c.total_budget <= 0.0 || c.step_budget <= 0.0) {
    throw ConfigError("budgets must be positive");
  }
  if (c.train_sl < 1 || c.train_rl < 1 || c.test < 1) {
    throw ConfigError("instance counts must be >= 1");
  }
  if (c.tau <= 0.0 || c.tau >= 1.0) throw ConfigError("tau must be in (0,1)");
  if (c.reward != "objective" && c.reward != "gap") {
    throw ConfigError("reward must be 'objective' or 'gap'");
  }
  for (const std::string& mth : split_csv(c.methods)) {
    if (mth != "OPT" && mth != "PROP^b" && mth != "PROP" && mth != "PROPEL") {
      throw ConfigError("unknown method '" + mth + "'");
    }
  }
  return c;
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "absolute_noise=" << (c.absolute_noise ? "true" : "false") << '\n'
      << "alpha=" << c.alpha << '\n'
      << "batch=" << c.batch << '\n'
      << "deterministic_clock=" << (c.deterministic_clock ? "true" : "false")
      << '\n'
      << "episodes=" << c.episodes << '\n'
      << "epochs=" << c.epochs << '\n'
      << "force=" << (c.force ? "true" : "false") << '\n'
      << "gamma=" << c.gamma << '\n'
      << "grid_search=" << (c.grid_search ? "true" : "false") << '\n'
      << "lr=" << c.lr << '\n'
      << "m=" << c.m << '\n'
      << "methods=" << c.methods << '\n'
      << "noise_halfwidth=" << c.noise_halfwidth << '\n'
      << "noise_mean=" << c.noise_mean << '\n'
      << "noise_sd=" << c.noise_sd << '\n'
      << "out_dir=" << c.out_dir << '\n'
      << "parts=" << c.parts << '\n'
      << "periods=" << c.periods << '\n'
      << "products=" << c.products << '\n'
      << "prop_budget=" << c.prop_budget << '\n'
      << "raw_reward=" << (c.raw_reward ? "true" : "false") << '\n'
      << "rc_sign_flip=" << (c.rc_sign_flip ? "true" : "false") << '\n'
      << "rel_gap=" << c.rel_gap << '\n'
      << "reward=" << c.reward << '\n'
      << "rl_lr=" << c.rl_lr << '\n'
      << "scale=" << c.scale << '\n'
      << "seed=" << c.seed << '\n'
      << "shared_model=" << (c.shared_model ? "true" : "false") << '\n'
      << "snapshots=" << c.snapshots << '\n'
      << "step_budget=" << c.step_budget << '\n'
      << "t_max=" << c.t_max << '\n'
      << "tau=" << c.tau << '\n'
      << "test=" << c.test << '\n'
      << "test_extra=" << c.test_extra << '\n'
      << "total_budget=" << c.total_budget << '\n'
      << "train_rl=" << c.train_rl << '\n'
      << "train_sl=" << c.train_sl << '\n'
      << "weights_by_value=" << (c.weights_by_value ? "true" : "false")
      << '\n';
  return out.str();
}

int scaled_count(int base, double scale) {
  return std::max(1, static_cast<int>(std::floor(base * scale)));
}

double scaled_budget(double base, double scale) {
  return std::max(1.0, std::floor(base * scale));
}

namespace {

ScpTopology make_topology(int products, int parts, int periods) {
  ScpTopology topo;
  topo.num_products = products;
  topo.num_parts = parts;
  topo.num_periods = periods;
  topo.satisfies.resize(static_cast<std::size_t>(parts));
  for (int i = 0; i < products; ++i) {
    const int j = static_cast<int>(
        static_cast<long long>(i) * parts / products);
    topo.satisfies[static_cast<std::size_t>(std::min(j, parts - 1))]
        .push_back(i);
  }
  // Overlap: each part can also serve the first product of the next block,
  // so some demands have more than one source.
  if (parts >= 2) {
    for (int j = 0; j < parts; ++j) {
      const auto& next = topo.satisfies[static_cast<std::size_t>((j + 1) %
                                                                 parts)];
      if (next.empty()) continue;
      auto& own = topo.satisfies[static_cast<std::size_t>(j)];
      if (std::find(own.begin(), own.end(), next.front()) == own.end()) {
        own.push_back(next.front());
      }
      std::sort(own.begin(), own.end());
    }
  }
  const int resources = std::max(1, parts / 5);
  topo.cap_groups.resize(static_cast<std::size_t>(resources));
  for (int j = 0; j < parts; ++j) {
    const int r = std::min(resources - 1,
                           static_cast<int>(static_cast<long long>(j) *
                                            resources / parts));
    topo.cap_groups[static_cast<std::size_t>(r)].push_back(j);
  }
  topo.initial_inventory.assign(static_cast<std::size_t>(parts), 0.0);
  return topo;
}

std::string instance_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inst-%05d", k);
  return buf;
}

struct Manifest {
  std::vector<std::string> train_sl;
  std::vector<std::string> train_rl;
  std::vector<std::string> test;
};

Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) {
    throw DataError("missing manifest " + path.string());
  }
  const nlohmann::json j = read_json_file(path);
  if (j.value("format", "") != "propel-manifest") {
    throw DataError("bad manifest format in " + path.string());
  }
  Manifest m;
  m.train_sl = j.at("splits").at("train_sl").get<std::vector<std::string>>();
  m.train_rl = j.at("splits").at("train_rl").get<std::vector<std::string>>();
  m.test = j.at("splits").at("test").get<std::vector<std::string>>();
  return m;
}

std::vector<ScpInstance> load_split(const fs::path& dir,
                                    const std::vector<std::string>& names) {
  std::vector<ScpInstance> out;
  for (const std::string& n : names) {
    const fs::path p = dir / "instances" / (n + ".json");
    if (!fs::exists(p)) throw DataError("missing instance file " + p.string());
    out.push_back(scp_from_json(read_json_file(p)));
  }
  return out;
}

SolveLimits make_limits(const RunConfig& cfg, double budget) {
  SolveLimits lim;
  lim.time_limit = budget;
  lim.rel_gap = cfg.rel_gap;
  lim.deterministic_clock = cfg.deterministic_clock;
  return lim;
}

RlHyper make_rl_hyper(const RunConfig& cfg) {
  RlHyper rl;
  rl.gamma = cfg.gamma;
  rl.alpha = cfg.alpha;
  rl.lr = cfg.rl_lr;
  rl.t_max = cfg.t_max;
  rl.eps_tolerance = cfg.rel_gap;
  rl.step_time_limit = scaled_budget(cfg.step_budget, cfg.scale);
  rl.episodes = cfg.episodes;
  rl.m = cfg.m;
  rl.seed = Rng(cfg.seed).split(37).next_u64();
  rl.reward_opts.raw = cfg.raw_reward;
  rl.reward_opts.gap_based = cfg.reward == "gap";
  return rl;
}

double elapsed_of(const MipResult& res, const RunConfig& cfg,
                  std::chrono::steady_clock::time_point t0) {
  if (cfg.deterministic_clock) return static_cast<double>(res.node_count);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

void cmd_generate(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  if (fs::exists(dir) && !cfg.force) {
    throw DataError("output directory " + dir.string() +
                    " exists; pass force=true to overwrite");
  }
  fs::create_directories(dir / "instances");

  const int products = scaled_count(cfg.products, cfg.scale);
  const int parts = scaled_count(cfg.parts, cfg.scale);
  const ScpTopology topo = make_topology(products, parts, cfg.periods);

  const std::vector<ScpInstance> snapshots = generate_snapshots(
      topo, std::max(1, cfg.snapshots), Rng(cfg.seed).split(21).next_u64());

  const int n_sl = scaled_count(cfg.train_sl, cfg.scale);
  const int n_rl = scaled_count(cfg.train_rl, cfg.scale);
  const int n_test = scaled_count(cfg.test, cfg.scale) + cfg.test_extra;
  const int total = n_sl + n_rl + n_test;

  Manifest man;
  for (int k = 0; k < total; ++k) {
    NoiseParams noise;
    noise.gauss_mean_scale = cfg.noise_mean;
    noise.gauss_sd_scale = cfg.noise_sd;
    noise.uniform_halfwidth = cfg.noise_halfwidth;
    noise.multiplicative_uniform = !cfg.absolute_noise;
    noise.seed = Rng(cfg.seed).split(100 + static_cast<std::uint64_t>(k))
                     .next_u64();
    ScpInstance inst =
        perturb(snapshots[static_cast<std::size_t>(k) % snapshots.size()],
                noise);
    inst.name = instance_name(k);
    write_json_file(dir / "instances" / (inst.name + ".json"),
                    scp_to_json(inst));
    if (k < n_sl) {
      man.train_sl.push_back(inst.name);
    } else if (k < n_sl + n_rl) {
      man.train_rl.push_back(inst.name);
    } else {
      man.test.push_back(inst.name);
    }
  }

  nlohmann::ordered_json j;
  j["format"] = "propel-manifest";
  j["version"] = 1;
  j["splits"]["train_sl"] = man.train_sl;
  j["splits"]["train_rl"] = man.train_rl;
  j["splits"]["test"] = man.test;
  write_json_file(dir / "manifest.json", j);
  write_text_file(dir / "config.txt", config_to_text(cfg));
}

void cmd_train(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  const Manifest man = read_manifest(dir);
  if (man.train_sl.empty()) throw DataError("empty train_sl split");
  const std::vector<ScpInstance> sl = load_split(dir, man.train_sl);

  const ScpTopology& topo = sl.front().topology;
  const MipInstance mip0 = build_scp_mip(sl.front());
  FeatureSet fsets = build_feature_set(mip0, topo);
  calibrate_normalizer(fsets, sl);

  const SolveLimits label_lim =
      make_limits(cfg, scaled_budget(cfg.total_budget, cfg.scale));
  LabelOptions lopts;
  lopts.weights_by_value = cfg.weights_by_value;
  const auto dataset = label_dataset(sl, fsets, label_lim, lopts);

  TrainHyper hyper;
  hyper.lr = cfg.lr;
  hyper.epochs = cfg.epochs;
  hyper.batch = cfg.batch;
  hyper.seed = Rng(cfg.seed).split(31).next_u64();
  TrainGrid grid;
  std::vector<TrainReportRow> report;
  FixModelSet ms =
      train(fsets, dataset, hyper, cfg.grid_search ? &grid : nullptr,
            cfg.shared_model, &report);
  ms.tau = cfg.tau;
  ms.rc_sign_flip = cfg.rc_sign_flip;
  write_json_file(dir / "models.json", model_set_to_json(ms));

  std::ostringstream rep;
  rep << "var,f1,arch\n";
  for (const TrainReportRow& r : report) {
    rep << r.var << ',' << r.f1 << ',' << r.arch << '\n';
  }
  write_text_file(dir / "train_report.csv", rep.str());

  // DRL stage: only instances the supervised reduction fails to bring
  // within tolerance are worth training on.
  const std::vector<ScpInstance> rl_all = load_split(dir, man.train_rl);
  const SolveLimits prop_lim =
      make_limits(cfg, scaled_budget(cfg.prop_budget, cfg.scale));
  std::vector<ScpInstance> selected;
  for (const ScpInstance& inst : rl_all) {
    const MipInstance mip = build_scp_mip(inst);
    const LpSolution lp = LpSolver(mip).solve();
    if (lp.status != LpStatus::kOptimal) continue;
    const FixSet fix = predict_fix_set(ms, mip, inst, lp, true);
    const MipResult res =
        solve_mip(build_reduced_mip(mip, fix), prop_lim);
    const double gap = res.has_solution()
                           ? primal_gap(res.best_objective, lp.objective)
                           : 1.0;
    if (gap > cfg.rel_gap) selected.push_back(inst);
  }
  if (selected.empty()) {
    std::cerr << "notice: every RL training instance is within tolerance "
                 "after reduction; q-net training skipped\n";
    return;
  }
  const RlHyper rl = make_rl_hyper(cfg);
  std::string log;
  const QNet qnet = train_rl(selected, ms, rl, make_limits(cfg, 0.0), &log);
  write_json_file(dir / "qnet.json", qnet.to_json());
  write_text_file(dir / "episode_log.csv", log);
}

void cmd_evaluate(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  const Manifest man = read_manifest(dir);
  const std::vector<ScpInstance> test = load_split(dir, man.test);
  const std::vector<std::string> methods = split_csv(cfg.methods);

  const bool needs_models =
      std::any_of(methods.begin(), methods.end(),
                  [](const std::string& s) { return s != "OPT"; });
  std::optional<FixModelSet> ms;
  if (needs_models) {
    const fs::path mp = dir / "models.json";
    if (!fs::exists(mp)) {
      throw DataError("missing checkpoint " + mp.string() +
                      " required by requested methods");
    }
    ms = model_set_from_json(read_json_file(mp));
  }
  std::optional<QNet> qnet;
  const bool wants_propel =
      std::find(methods.begin(), methods.end(), "PROPEL") != methods.end();
  if (wants_propel) {
    const fs::path qp = dir / "qnet.json";
    if (fs::exists(qp)) {
      qnet = QNet::from_json(read_json_file(qp));
    } else {
      std::cerr << "notice: qnet.json absent; PROPEL rows skipped\n";
    }
  }

  const double horizon = scaled_budget(cfg.total_budget, cfg.scale);
  const double prop_budget = scaled_budget(cfg.prop_budget, cfg.scale);
  std::vector<ResultRow> rows;
  std::ostringstream traces;
  traces.precision(17);
  traces << "instance,method,t,gap\n";

  auto emit = [&](const std::string& inst, const std::string& method,
                  const MipResult& res, double lp_star, double rt,
                  int n_fixed, int n_int) {
    const GapTrace trace = make_trace(res, lp_star, horizon);
    ResultRow row;
    row.instance = inst;
    row.method = method;
    row.pi = primal_integral(trace, horizon);
    row.pg = gap_at(trace, horizon);
    row.rt = rt;
    row.n_fixed = n_fixed;
    row.n_int = n_int;
    rows.push_back(row);
    for (const auto& [t, obj] : trace.entries) {
      traces << inst << ',' << method << ',' << t << ','
             << primal_gap(obj, lp_star) << '\n';
    }
  };

  for (const ScpInstance& inst : test) {
    const MipInstance mip = build_scp_mip(inst);
    int n_int = 0;
    for (const Variable& v : mip.vars) n_int += v.is_integer;
    const LpSolution lp = LpSolver(mip).solve();
    if (lp.status != LpStatus::kOptimal) {
      throw DataError("relaxation not optimal for " + inst.name);
    }
    const double lp_star = lp.objective;

    for (const std::string& method : methods) {
      const auto t0 = std::chrono::steady_clock::now();
      if (method == "OPT") {
        const MipResult res = solve_mip(mip, make_limits(cfg, horizon));
        emit(inst.name, method, res, lp_star, elapsed_of(res, cfg, t0), 0,
             n_int);
      } else if (method == "PROP^b" || method == "PROP") {
        const FixSet fix =
            predict_fix_set(*ms, mip, inst, lp, method == "PROP");
        const MipResult res = solve_mip(build_reduced_mip(mip, fix),
                                        make_limits(cfg, horizon));
        emit(inst.name, method, res, lp_star, elapsed_of(res, cfg, t0),
             static_cast<int>(fix.var_names.size()), n_int);
      } else if (method == "PROPEL" && qnet) {
        const FixSet fix = predict_fix_set(*ms, mip, inst, lp, true);
        const MipResult prop = solve_mip(build_reduced_mip(mip, fix),
                                         make_limits(cfg, prop_budget));
        const InferResult inf =
            infer(inst, mip, fix, prop, lp_star, *qnet, make_rl_hyper(cfg),
                  make_limits(cfg, 0.0));
        emit(inst.name, method, inf.result, lp_star,
             elapsed_of(inf.result, cfg, t0),
             static_cast<int>(fix.var_names.size()), n_int);
      }
    }
  }
  write_text_file(dir / "results.csv", results_csv(rows));
  write_text_file(dir / "traces.csv", traces.str());
}

void cmd_report(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  const fs::path rp = dir / "results.csv";
  if (!fs::exists(rp)) throw DataError("missing results file " + rp.string());
  std::vector<ResultRow> rows;
  try {
    rows = parse_results_csv(read_text_file(rp));
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }

  std::map<std::string, std::map<std::string, ResultRow>> by_inst;
  std::vector<std::string> method_order;
  for (const ResultRow& r : rows) {
    by_inst[r.instance][r.method] = r;
    if (std::find(method_order.begin(), method_order.end(), r.method) ==
        method_order.end()) {
      method_order.push_back(r.method);
    }
  }

  std::ostringstream summary;
  summary.precision(17);
  summary << "method,pi_red_avg,pi_red_max,pg_red_avg,pg_red_max,"
             "int_red_avg,int_red_max\n";
  std::ostringstream human;
  human << "Reductions relative to OPT, per method (positive = better):\n";
  for (const std::string& method : method_order) {
    if (method == "OPT") continue;
    std::vector<double> pi_red;
    std::vector<double> pg_red;
    std::vector<double> int_red;
    for (const auto& [inst, per_method] : by_inst) {
      const auto opt_it = per_method.find("OPT");
      const auto m_it = per_method.find(method);
      if (opt_it == per_method.end() || m_it == per_method.end()) continue;
      const ResultRow& o = opt_it->second;
      const ResultRow& r = m_it->second;
      if (o.pi > 0.0) pi_red.push_back((o.pi - r.pi) / o.pi);
      if (o.pg > 0.0) pg_red.push_back((o.pg - r.pg) / o.pg);
      if (r.n_int > 0) {
        int_red.push_back(static_cast<double>(r.n_fixed) / r.n_int);
      }
    }
    auto avg = [](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto mx = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    };
    summary << method << ',' << avg(pi_red) << ',' << mx(pi_red) << ','
            << avg(pg_red) << ',' << mx(pg_red) << ',' << avg(int_red) << ','
            << mx(int_red) << '\n';
    human << "  " << method << ": PI avg " << 100.0 * avg(pi_red)
          << "% max " << 100.0 * mx(pi_red) << "%; PG avg "
          << 100.0 * avg(pg_red) << "% max " << 100.0 * mx(pg_red)
          << "%; integers removed avg " << 100.0 * avg(int_red) << "%\n";
  }
  write_text_file(dir / "summary.csv", summary.str());

  // Time to first incumbent and gap-over-time plot data from the traces.
  const fs::path tp = dir / "traces.csv";
  if (fs::exists(tp)) {
    std::istringstream in(read_text_file(tp));
    std::string line;
    std::getline(in, line);  // header
    // first-incumbent time per (instance, method); trace rows are in time
    // order per pair.
    std::map<std::pair<std::string, std::string>, double> first;
    std::map<std::pair<std::string, std::string>,
             std::vector<std::pair<double, double>>>
        curves;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string inst, method, ts, gs;
      std::getline(ls, inst, ',');
      std::getline(ls, method, ',');
      std::getline(ls, ts, ',');
      std::getline(ls, gs);
      const double t = std::stod(ts);
      const double g = std::stod(gs);
      first.emplace(std::make_pair(inst, method), t);
      curves[{inst, method}].emplace_back(t, g);
    }
    std::ostringstream tfi;
    tfi.precision(17);
    tfi << "method,count,min,avg,max\n";
    for (const std::string& method : method_order) {
      std::vector<double> times;
      for (const auto& [key, t] : first) {
        if (key.second == method) times.push_back(t);
      }
      if (times.empty()) {
        tfi << method << ",0,,,\n";
        continue;
      }
      double sum = 0.0;
      for (double t : times) sum += t;
      tfi << method << ',' << times.size() << ','
          << *std::min_element(times.begin(), times.end()) << ','
          << sum / static_cast<double>(times.size()) << ','
          << *std::max_element(times.begin(), times.end()) << '\n';
      human << "first incumbent (" << method << "): avg "
            << sum / static_cast<double>(times.size()) << '\n';
    }
    write_text_file(dir / "first_incumbent.csv", tfi.str());

    // Average step-function gap across instances at evenly spaced times;
    // an instance contributes 1.0 before its first incumbent.
    const double horizon = scaled_budget(cfg.total_budget, cfg.scale);
    std::ostringstream plot;
    plot.precision(17);
    plot << "t,method,avg_gap\n";
    for (const std::string& method : method_order) {
      for (int k = 0; k <= 20; ++k) {
        const double t = horizon * k / 20.0;
        double sum = 0.0;
        int count = 0;
        for (const auto& [inst, per_method] : by_inst) {
          if (per_method.find(method) == per_method.end()) continue;
          double g = 1.0;
          const auto it = curves.find({inst, method});
          if (it != curves.end()) {
            for (const auto& [ti, gi] : it->second) {
              if (ti > t) break;
              g = gi;
            }
          }
          sum += g;
          ++count;
        }
        plot << t << ',' << method << ','
             << (count > 0 ? sum / count : 1.0) << '\n';
      }
    }
    write_text_file(dir / "plot_gap_time.csv", plot.str());
  }
  write_text_file(dir / "report.txt", human.str());
}

}  // namespace propel
