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

#ifndef PROPEL_PIPELINE_H_
#define PROPEL_PIPELINE_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace propel {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a full benchmark run needs, captured in one artifact. Counts,
// topology sizes, and budgets are given at reference scale and shrunk by
// `scale` (proportional floor, minimum 1).
struct RunConfig {
  // Topology at reference scale.
  int products = 400;
  int parts = 200;
  int periods = 8;
  int snapshots = 5;
  double scale = 1.0;
  // Instance counts at reference scale; test_extra is added unscaled.
  int train_sl = 500;
  int train_rl = 100;
  int test = 60;
  int test_extra = 0;
  // Budgets at reference scale: seconds, or ticks on the deterministic
  // clock.
  double prop_budget = 600.0;
  double total_budget = 1000.0;
  double step_budget = 100.0;
  bool deterministic_clock = true;
  double rel_gap = 0.01;
  // Supervised component.
  double tau = 0.9;
  double lr = 0.005;
  int epochs = 100;
  int batch = 32;
  bool grid_search = true;
  bool shared_model = false;
  // Generated planning instances are min-form, where a positive reduced
  // cost at the zero bound argues for staying there; flip the score so it
  // raises, not lowers, the fixing score.
  bool rc_sign_flip = true;
  bool weights_by_value = false;
  // DRL component.
  int m = 8;
  int episodes = 40;
  int t_max = 4;
  double gamma = 0.99;
  double alpha = 0.1;
  double rl_lr = 0.001;
  bool raw_reward = false;
  std::string reward = "objective";  // or "gap"
  // Demand noise.
  double noise_mean = 1.0;
  double noise_sd = 1.0;
  double noise_halfwidth = 0.2;
  bool absolute_noise = false;
  std::uint64_t seed = 1;
  std::string methods = "OPT,PROP^b,PROP,PROPEL";
  std::string out_dir = "run";
  bool force = false;
};

// Key-value configuration: file first, then PROPEL_<UPPER_KEY> environment
// overrides, then explicit overrides (CLI flags). Unknown keys or malformed
// values raise ConfigError.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_env_overrides(std::map<std::string, std::string>& kv);
RunConfig parse_config(const std::map<std::string, std::string>& kv);
std::string config_to_text(const RunConfig& cfg);

int scaled_count(int base, double scale);
double scaled_budget(double base, double scale);

void cmd_generate(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

}  // namespace propel

#endif  // PROPEL_PIPELINE_H_
