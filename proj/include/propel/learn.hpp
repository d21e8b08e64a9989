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

#ifndef PROPEL_LEARN_H_
#define PROPEL_LEARN_H_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "propel/features.hpp"
#include "propel/mlp.hpp"
#include "propel/scp.hpp"
#include "propel/simplex.hpp"
#include "propel/solve.hpp"

namespace propel {

struct LabeledExample {
  std::string var_name;
  std::vector<double> features;
  int psi = 0;         // 0 iff |opt_value| < 0.5
  long opt_value = 0;  // rounded value in the labeling solution
  double w_fn = 1.0;   // false-negative weight from the instance's labels
};

// Per-variable binary classifier predicting "stays at zero". Variables whose
// training labels are all one class get a constant predictor instead of a
// network.
struct VarModel {
  std::string var_name;
  bool constant = false;
  double const_p_zero = 0.0;
  std::optional<Mlp> net;

  double predict_zero_prob(const std::vector<double>& x) const;
};

enum class RcScaleMode { kMaxAbs, kFixed };

struct FixModelSet {
  FeatureSet features;
  std::vector<VarModel> models;  // aligned with features.specs
  double tau = 0.9;
  RcScaleMode rc_scale_mode = RcScaleMode::kMaxAbs;
  double rc_fixed_scale = 1.0;
  // The score adjustment is written for max-form duals; set to negate it on
  // instances whose reduced costs follow the opposite convention.
  bool rc_sign_flip = false;
  // One network over (features + role one-hot) instead of per-variable nets.
  bool shared = false;
  std::optional<Mlp> shared_net;

  double zero_prob(std::size_t model_idx, const std::vector<double>& x) const;
};

struct TrainHyper {
  double lr = 0.005;
  int layers = 3;  // weight layers; layers - 1 hidden blocks
  int hidden = 32;
  int epochs = 100;
  int batch = 32;
  std::uint64_t seed = 0;
};

// Hyper grids searched per variable; best architecture picked on validation
// F1 of the fix class.
struct TrainGrid {
  std::vector<double> lrs{0.001, 0.005};
  std::vector<int> layers{3, 4};
  std::vector<int> hidden{32, 64, 128};
};

struct TrainReportRow {
  std::string var;
  double f1 = 0.0;
  std::string arch;
};

struct LabelOptions {
  // Use the variable's value rather than its 0/1 indicator in the
  // false-negative weight ratio.
  bool weights_by_value = false;
  ScpBuildOptions build;
};

// Solves each instance to the limit's gap and labels every integer variable.
// Instances that end without an incumbent are dropped. Returns one example
// list per feature-set variable.
std::vector<std::vector<LabeledExample>> label_dataset(
    const std::vector<ScpInstance>& instances, const FeatureSet& fs,
    const SolveLimits& lim, const LabelOptions& opts = {});

struct LossWeights {
  std::vector<double> w_fp;
  std::vector<double> w_fn;
};
// w_fp = 1; w_fn_i = exp(psi_i / sum_j psi_j), all ones when the sum is 0.
LossWeights compute_weights(const std::vector<int>& psis);

// -[w_fn * psi * log(p) + w_fp * (1 - psi) * log(1 - p)] with p clamped to
// [1e-12, 1 - 1e-12]. `pred_nonzero_prob` is the predicted probability that
// the variable is nonzero.
double weighted_ce_loss(double pred_nonzero_prob, int psi, double w_fn,
                        double w_fp);

FixModelSet train(const FeatureSet& fs,
                  const std::vector<std::vector<LabeledExample>>& dataset,
                  const TrainHyper& hyper, const TrainGrid* grid = nullptr,
                  bool shared_model = false,
                  std::vector<TrainReportRow>* report = nullptr);

// r = -(1/pi) * arctan(rc / s), in (-0.5, 0.5); s must be positive.
double normalized_rc(double rc, double s);

struct FixSet {
  std::vector<std::string> var_names;
};

// Score rule: fix variable i when zero_prob_i + r_i >= tau. Variables
// without a model are never fixed. `use_rc` off reduces the rule to
// zero_prob_i >= tau.
FixSet predict_fix_set(const FixModelSet& models, const MipInstance& mip,
                       const ScpInstance& inst, const LpSolution& lp,
                       bool use_rc = true);

// Copy of `mip` with lb = ub = 0 for every listed variable. Only integer
// variables may be fixed.
MipInstance build_reduced_mip(const MipInstance& mip, const FixSet& fix);

// Checkpoints carry the feature-spec hash; loading refuses on mismatch.
nlohmann::ordered_json model_set_to_json(const FixModelSet& ms);
FixModelSet model_set_from_json(const nlohmann::json& j);

}  // namespace propel

#endif  // PROPEL_LEARN_H_
