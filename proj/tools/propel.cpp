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

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "propel/io.hpp"
#include "propel/mps.hpp"
#include "propel/pipeline.hpp"
#include "propel/scp.hpp"
#include "propel/solve.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct PipelineArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::string> out_dir;
  std::optional<double> scale;
  std::optional<long long> seed;
  bool force = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs* args) {
  cmd->add_option("--config", args->config_file, "key=value config file");
  cmd->add_option("--set", args->sets,
                  "override a config key, e.g. --set tau=0.85");
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--scale", args->scale,
                  "shrink counts, topology, and budgets by this factor");
  cmd->add_option("--seed", args->seed, "master seed");
  cmd->add_flag("--force", args->force, "overwrite an existing output dir");
}

propel::RunConfig resolve_config(const PipelineArgs& args) {
  std::map<std::string, std::string> kv;
  if (!args.config_file.empty()) {
    kv = propel::read_config_file(args.config_file);
  }
  propel::apply_env_overrides(kv);
  for (const std::string& s : args.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw propel::ConfigError("--set expects key=value, got '" + s + "'");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (args.out_dir) kv["out_dir"] = *args.out_dir;
  if (args.scale) kv["scale"] = std::to_string(*args.scale);
  if (args.seed) kv["seed"] = std::to_string(*args.seed);
  if (args.force) kv["force"] = "true";
  return propel::parse_config(kv);
}

propel::MipInstance load_instance(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw propel::DataError("no such instance file: " + path);
  }
  const auto ends_with = [&path](const char* suf) {
    const std::string s(suf);
    return path.size() >= s.size() &&
           path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".mps")) {
    return propel::parse_mps(propel::read_text_file(path));
  }
  const nlohmann::json j = propel::read_json_file(path);
  if (j.value("format", "") == "propel-instance") {
    return propel::mip_from_json(j);
  }
  return propel::build_scp_mip(propel::scp_from_json(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned fix-and-release pipeline for planning MIPs"};
  app.require_subcommand(1);

  PipelineArgs gen_args, train_args, eval_args, report_args;
  CLI::App* gen = app.add_subcommand("generate", "generate instance dataset");
  add_pipeline_options(gen, &gen_args);
  CLI::App* train = app.add_subcommand("train", "train models and q-net");
  add_pipeline_options(train, &train_args);
  CLI::App* eval =
      app.add_subcommand("evaluate", "run the method comparison");
  add_pipeline_options(eval, &eval_args);
  CLI::App* report = app.add_subcommand("report", "summarize results");
  add_pipeline_options(report, &report_args);

  std::string solve_in;
  std::string solve_out;
  std::string external_cmd;
  double time_limit = 1e9;
  double rel_gap = 0.01;
  bool deterministic = false;
  long long node_limit = -1;
  long long brute = -1;
  CLI::App* solve = app.add_subcommand("solve", "solve a single instance");
  solve->add_option("--in", solve_in, "instance file (.json or .mps)")
      ->required();
  solve->add_option("--out", solve_out, "solution file (default: stdout)");
  solve->add_option("--time-limit", time_limit,
                    "seconds, or ticks with --deterministic");
  solve->add_option("--rel-gap", rel_gap, "relative gap termination");
  solve->add_flag("--deterministic", deterministic,
                  "count nodes instead of wall time");
  solve->add_option("--node-limit", node_limit, "node budget");
  solve->add_option("--brute-force", brute,
                    "exhaustive oracle with this enumeration budget");
  solve->add_option("--external", external_cmd,
                    "external solver command with {in} {out} {timelimit}");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      propel::cmd_generate(resolve_config(gen_args));
    } else if (*train) {
      propel::cmd_train(resolve_config(train_args));
    } else if (*eval) {
      propel::cmd_evaluate(resolve_config(eval_args));
    } else if (*report) {
      propel::cmd_report(resolve_config(report_args));
    } else if (*solve) {
      const propel::MipInstance mip = load_instance(solve_in);
      propel::SolveLimits lim;
      lim.time_limit = time_limit;
      lim.rel_gap = rel_gap;
      lim.deterministic_clock = deterministic;
      if (node_limit >= 0) lim.node_limit = node_limit;
      propel::MipResult res;
      if (brute >= 0) {
        res = propel::brute_force(mip, brute);
      } else if (!external_cmd.empty()) {
        res = propel::external_solve(mip, external_cmd, lim);
      } else {
        res = propel::solve_mip(mip, lim);
      }
      const std::string text = propel::format_solution_file(mip, res);
      if (solve_out.empty()) {
        std::cout << text;
      } else {
        propel::write_text_file(solve_out, text);
      }
    }
  } catch (const propel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const propel::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const propel::MpsError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
