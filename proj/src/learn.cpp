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

#include "propel/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace propel {
namespace {

constexpr double kProbClamp = 1e-12;

std::map<std::string, int> name_index(const MipInstance& mip) {
  std::map<std::string, int> idx;
  for (int i = 0; i < mip.num_vars(); ++i) idx[mip.vars[i].name] = i;
  return idx;
}

std::vector<double> role_onehot(const std::string& var_name) {
  // Integer planning variables are production ('z') or consumption ('x').
  return {var_name.rfind("z[", 0) == 0 ? 1.0 : 0.0,
          var_name.rfind("x[", 0) == 0 ? 1.0 : 0.0};
}

std::vector<double> with_role(const std::vector<double>& x,
                              const std::string& var_name) {
  std::vector<double> out = x;
  const std::vector<double> oh = role_onehot(var_name);
  out.insert(out.end(), oh.begin(), oh.end());
  return out;
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
  }
}

// One Adam pass over shuffled mini-batches per epoch. Examples may carry a
// role suffix already; `input_dim` is taken from the network.
void fit(Mlp& net, const std::vector<const LabeledExample*>& examples,
         const std::vector<std::vector<double>>& inputs, double lr,
         int epochs, int batch, Rng& rng) {
  Adam opt(net.num_params(), lr);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> grad(static_cast<std::size_t>(net.num_params()));
  for (int e = 0; e < epochs; ++e) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(batch)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(batch));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const LabeledExample& ex = *examples[order[k]];
        Mlp::Cache cache;
        const std::vector<double> logits = net.forward(inputs[order[k]], &cache);
        const std::vector<double> p = softmax(logits);
        // Weighted cross-entropy gradient w.r.t. logits.
        const double w = ex.psi == 1 ? ex.w_fn : 1.0;
        std::vector<double> dout = {w * (p[0] - (ex.psi == 0 ? 1.0 : 0.0)),
                                    w * (p[1] - (ex.psi == 1 ? 1.0 : 0.0))};
        net.backward(cache, dout, &grad);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      opt.step(net.mutable_params(), grad);
    }
  }
}

double f1_fix_class(const std::vector<int>& truth,
                    const std::vector<int>& pred) {
  // Positive event: the variable stays at zero (psi = 0).
  int tp = 0;
  int fp = 0;
  int fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 0;
    const bool p = pred[i] == 0;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  if (2 * tp + fp + fn == 0) return 0.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

std::string arch_string(double lr, int layers, int hidden) {
  std::ostringstream out;
  out << "lr=" << lr << ",layers=" << layers << ",hidden=" << hidden;
  return out.str();
}

std::vector<int> net_sizes(int input, int layers, int hidden) {
  if (layers < 2) throw std::invalid_argument("layers must be >= 2");
  std::vector<int> sizes{input};
  for (int l = 0; l < layers - 1; ++l) sizes.push_back(hidden);
  sizes.push_back(2);
  return sizes;
}

}  // namespace

double VarModel::predict_zero_prob(const std::vector<double>& x) const {
  if (constant) return const_p_zero;
  if (!net) throw std::logic_error("model has no network");
  return softmax(net->forward(x))[0];
}

double FixModelSet::zero_prob(std::size_t model_idx,
                              const std::vector<double>& x) const {
  const VarModel& m = models.at(model_idx);
  if (shared) {
    if (m.constant) return m.const_p_zero;
    if (!shared_net) throw std::logic_error("shared model missing network");
    return softmax(shared_net->forward(with_role(x, m.var_name)))[0];
  }
  return m.predict_zero_prob(x);
}

std::vector<std::vector<LabeledExample>> label_dataset(
    const std::vector<ScpInstance>& instances, const FeatureSet& fs,
    const SolveLimits& lim, const LabelOptions& opts) {
  std::vector<std::vector<LabeledExample>> out(fs.specs.size());
  for (const ScpInstance& inst : instances) {
    const MipInstance mip = build_scp_mip(inst, opts.build);
    const MipResult res = solve_mip(mip, lim);
    if (res.best_solution.empty()) {
      std::cerr << "warning: no incumbent for " << inst.name
                << ", instance dropped from labeling\n";
      continue;
    }
    const auto idx = name_index(mip);
    std::vector<long> values(fs.specs.size());
    std::vector<int> psis(fs.specs.size());
    for (std::size_t k = 0; k < fs.specs.size(); ++k) {
      const double v = res.best_solution[idx.at(fs.var_names[k])];
      values[k] = std::lround(v);
      psis[k] = std::abs(v) < 0.5 ? 0 : 1;
    }
    std::vector<double> w_fn;
    if (!opts.weights_by_value) {
      w_fn = compute_weights(psis).w_fn;
    } else {
      double total = 0.0;
      for (long v : values) total += std::abs(static_cast<double>(v));
      w_fn.resize(values.size());
      for (std::size_t k = 0; k < values.size(); ++k) {
        w_fn[k] = total == 0.0
                      ? 1.0
                      : std::exp(std::abs(static_cast<double>(values[k])) /
                                 total);
      }
    }
    for (std::size_t k = 0; k < fs.specs.size(); ++k) {
      LabeledExample ex;
      ex.var_name = fs.var_names[k];
      ex.features = assemble_vector(fs.specs[k], inst, fs.normalizer);
      ex.psi = psis[k];
      ex.opt_value = values[k];
      ex.w_fn = w_fn[k];
      out[k].push_back(std::move(ex));
    }
  }
  return out;
}

LossWeights compute_weights(const std::vector<int>& psis) {
  if (psis.empty()) throw std::invalid_argument("empty label vector");
  double sum = 0.0;
  for (int p : psis) sum += p;
  LossWeights w;
  w.w_fp.assign(psis.size(), 1.0);
  w.w_fn.resize(psis.size());
  for (std::size_t i = 0; i < psis.size(); ++i) {
    w.w_fn[i] = sum == 0.0 ? 1.0 : std::exp(psis[i] / sum);
  }
  return w;
}

double weighted_ce_loss(double pred_nonzero_prob, int psi, double w_fn,
                        double w_fp) {
  const double p =
      std::clamp(pred_nonzero_prob, kProbClamp, 1.0 - kProbClamp);
  return -(w_fn * psi * std::log(p) + w_fp * (1 - psi) * std::log(1.0 - p));
}

FixModelSet train(const FeatureSet& fs,
                  const std::vector<std::vector<LabeledExample>>& dataset,
                  const TrainHyper& hyper, const TrainGrid* grid,
                  bool shared_model,
                  std::vector<TrainReportRow>* report) {
  if (dataset.size() != fs.specs.size()) {
    throw std::invalid_argument("dataset does not match feature set");
  }
  bool any = false;
  for (const auto& exs : dataset) any = any || !exs.empty();
  if (!any) throw std::invalid_argument("empty dataset");

  FixModelSet ms;
  ms.features = fs;
  ms.shared = shared_model;
  ms.models.resize(fs.specs.size());

  const TrainGrid single{{hyper.lr}, {hyper.layers}, {hyper.hidden}};
  const TrainGrid& g = grid ? *grid : single;

  // Pools either one variable's examples or, for the shared model, all of
  // them with a role suffix appended to the input.
  auto train_pool = [&](const std::vector<const LabeledExample*>& pool,
                        const std::vector<std::vector<double>>& inputs,
                        std::uint64_t stream, const std::string& label)
      -> std::optional<Mlp> {
    // Deterministic 80/20 split after a seeded shuffle.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(Rng(hyper.seed).split(stream).next_u64());
    shuffle_indices(order, split_rng);
    const std::size_t n_val = pool.size() / 5;
    std::vector<std::size_t> val(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> tr(order.begin() + n_val, order.end());
    if (val.empty()) val = tr;

    std::optional<Mlp> best;
    double best_f1 = -1.0;
    std::string best_arch;
    const int input = static_cast<int>(inputs.front().size());
    int config = 0;
    for (double lr : g.lrs) {
      for (int layers : g.layers) {
        for (int hidden : g.hidden) {
          Rng rng(Rng(hyper.seed).split(stream * 131 + config + 1).next_u64());
          Mlp net(net_sizes(input, layers, hidden), rng);
          std::vector<const LabeledExample*> tr_ex;
          std::vector<std::vector<double>> tr_in;
          for (std::size_t i : tr) {
            tr_ex.push_back(pool[i]);
            tr_in.push_back(inputs[i]);
          }
          fit(net, tr_ex, tr_in, lr, hyper.epochs, hyper.batch, rng);
          std::vector<int> truth;
          std::vector<int> pred;
          for (std::size_t i : val) {
            truth.push_back(pool[i]->psi);
            const double p0 = softmax(net.forward(inputs[i]))[0];
            pred.push_back(p0 >= 0.5 ? 0 : 1);
          }
          const double f1 = f1_fix_class(truth, pred);
          if (f1 > best_f1) {
            best_f1 = f1;
            best = std::move(net);
            best_arch = arch_string(lr, layers, hidden);
          }
          ++config;
        }
      }
    }
    if (report) report->push_back({label, best_f1, best_arch});
    return best;
  };

  if (shared_model) {
    std::vector<const LabeledExample*> pool;
    std::vector<std::vector<double>> inputs;
    for (const auto& exs : dataset) {
      for (const LabeledExample& ex : exs) {
        pool.push_back(&ex);
        inputs.push_back(with_role(ex.features, ex.var_name));
      }
    }
    ms.shared_net = train_pool(pool, inputs, 1, "shared");
    for (std::size_t k = 0; k < fs.specs.size(); ++k) {
      ms.models[k].var_name = fs.var_names[k];
    }
    return ms;
  }

  for (std::size_t k = 0; k < fs.specs.size(); ++k) {
    VarModel& m = ms.models[k];
    m.var_name = fs.var_names[k];
    const auto& exs = dataset[k];
    if (exs.empty()) {
      // No data: conservative constant that never crosses any tau < 1.
      m.constant = true;
      m.const_p_zero = 0.0;
      continue;
    }
    bool all_zero = true;
    bool all_one = true;
    for (const LabeledExample& ex : exs) {
      all_zero = all_zero && ex.psi == 0;
      all_one = all_one && ex.psi == 1;
    }
    if (all_zero || all_one) {
      m.constant = true;
      m.const_p_zero = all_zero ? 1.0 : 0.0;
      if (report) {
        report->push_back({m.var_name, 1.0, "constant"});
      }
      continue;
    }
    std::vector<const LabeledExample*> pool;
    std::vector<std::vector<double>> inputs;
    for (const LabeledExample& ex : exs) {
      pool.push_back(&ex);
      inputs.push_back(ex.features);
    }
    m.net = train_pool(pool, inputs, k + 2, m.var_name);
  }
  return ms;
}

double normalized_rc(double rc, double s) {
  if (s <= 0.0) throw std::invalid_argument("rc scale must be positive");
  return -std::atan(rc / s) / std::numbers::pi;
}

FixSet predict_fix_set(const FixModelSet& models, const MipInstance& mip,
                       const ScpInstance& inst, const LpSolution& lp,
                       bool use_rc) {
  if (use_rc && lp.status != LpStatus::kOptimal) {
    throw std::invalid_argument("rc adjustment needs an optimal relaxation");
  }
  const auto idx = name_index(mip);
  double scale = models.rc_fixed_scale;
  if (use_rc && models.rc_scale_mode == RcScaleMode::kMaxAbs) {
    scale = 0.0;
    for (int i = 0; i < mip.num_vars(); ++i) {
      if (mip.vars[i].is_integer) {
        scale = std::max(scale, std::abs(lp.reduced_costs[i]));
      }
    }
  }
  FixSet fix;
  for (std::size_t k = 0; k < models.features.specs.size(); ++k) {
    const std::string& name = models.features.var_names[k];
    const auto it = idx.find(name);
    if (it == idx.end()) continue;  // unknown variable: never fixed
    const VarModel& m = models.models[k];
    if (!m.constant && !m.net && !(models.shared && models.shared_net)) {
      continue;  // missing model: never fixed
    }
    const std::vector<double> x =
        assemble_vector(models.features.specs[k], inst,
                        models.features.normalizer);
    double score = models.zero_prob(k, x);
    if (use_rc && scale > 0.0) {
      double r = normalized_rc(lp.reduced_costs[it->second], scale);
      if (models.rc_sign_flip) r = -r;
      score += r;
    }
    if (score >= models.tau) fix.var_names.push_back(name);
  }
  return fix;
}

MipInstance build_reduced_mip(const MipInstance& mip, const FixSet& fix) {
  MipInstance out = mip;
  const auto idx = name_index(mip);
  for (const std::string& name : fix.var_names) {
    const auto it = idx.find(name);
    if (it == idx.end()) {
      throw std::invalid_argument("cannot fix unknown variable " + name);
    }
    Variable& v = out.vars[it->second];
    if (!v.is_integer) {
      throw std::invalid_argument("cannot fix continuous variable " + name);
    }
    v.lb = 0.0;
    v.ub = 0.0;
  }
  return out;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

nlohmann::ordered_json model_set_to_json(const FixModelSet& ms) {
  nlohmann::ordered_json j;
  j["format"] = "propel-models";
  j["version"] = 1;
  j["feature_hash"] = hash_hex(feature_set_hash(ms.features));
  j["tau"] = ms.tau;
  j["rc_scale_mode"] =
      ms.rc_scale_mode == RcScaleMode::kMaxAbs ? "max_abs" : "fixed";
  j["rc_fixed_scale"] = ms.rc_fixed_scale;
  j["rc_sign_flip"] = ms.rc_sign_flip;
  j["shared"] = ms.shared;
  j["shared_net"] =
      ms.shared_net ? ms.shared_net->to_json() : nlohmann::ordered_json();
  j["features"] = feature_set_to_json(ms.features);
  j["models"] = nlohmann::ordered_json::array();
  for (const VarModel& m : ms.models) {
    nlohmann::ordered_json jm;
    jm["var"] = m.var_name;
    jm["constant"] = m.constant;
    jm["p_zero"] = m.const_p_zero;
    jm["net"] = m.net ? m.net->to_json() : nlohmann::ordered_json();
    j["models"].push_back(std::move(jm));
  }
  return j;
}

FixModelSet model_set_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "propel-models" || j.value("version", 0) != 1) {
    throw std::runtime_error("unsupported model checkpoint format");
  }
  FixModelSet ms;
  ms.features = feature_set_from_json(j.at("features"));
  if (j.at("feature_hash").get<std::string>() !=
      hash_hex(feature_set_hash(ms.features))) {
    throw std::runtime_error(
        "model checkpoint feature hash mismatch; refusing to load");
  }
  ms.tau = j.at("tau").get<double>();
  ms.rc_scale_mode = j.at("rc_scale_mode").get<std::string>() == "fixed"
                         ? RcScaleMode::kFixed
                         : RcScaleMode::kMaxAbs;
  ms.rc_fixed_scale = j.at("rc_fixed_scale").get<double>();
  ms.rc_sign_flip = j.at("rc_sign_flip").get<bool>();
  ms.shared = j.at("shared").get<bool>();
  if (!j.at("shared_net").is_null()) {
    ms.shared_net = Mlp::from_json(j.at("shared_net"));
  }
  for (const auto& jm : j.at("models")) {
    VarModel m;
    m.var_name = jm.at("var").get<std::string>();
    m.constant = jm.at("constant").get<bool>();
    m.const_p_zero = jm.at("p_zero").get<double>();
    if (!jm.at("net").is_null()) m.net = Mlp::from_json(jm.at("net"));
    ms.models.push_back(std::move(m));
  }
  if (ms.models.size() != ms.features.specs.size()) {
    throw std::runtime_error("model checkpoint is inconsistent");
  }
  return ms;
}

}  // namespace propel
