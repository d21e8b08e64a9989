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

#ifndef PROPEL_MLP_H_
#define PROPEL_MLP_H_

#include <vector>

#include <json.hpp>

#include "propel/rng.hpp"

namespace propel {

// Fully connected network with ReLU hidden layers and a linear output.
// Parameters live in one flat vector (per layer: row-major weights, then
// biases) so the optimizer and finite-difference checks stay simple.
class Mlp {
 public:
  // sizes = {input, hidden..., output}. He-normal weight init, zero biases.
  Mlp(std::vector<int> sizes, Rng& rng);
  Mlp(std::vector<int> sizes, std::vector<double> params);

  struct Cache {
    std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
  };

  std::vector<double> forward(const std::vector<double>& x) const;
  std::vector<double> forward(const std::vector<double>& x,
                              Cache* cache) const;

  // dL/dparams for the cached example, given dL/doutput. Accumulates into
  // `grad` (same layout as params); returns dL/dinput.
  std::vector<double> backward(const Cache& cache,
                               const std::vector<double>& dout,
                               std::vector<double>* grad) const;

  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& mutable_params() { return params_; }
  int num_params() const { return static_cast<int>(params_.size()); }

  nlohmann::ordered_json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
};

// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
 public:
  explicit Adam(int num_params, double lr);
  void step(std::vector<double>& params, const std::vector<double>& grad);
  double lr() const { return lr_; }

 private:
  double lr_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Numerically safe softmax.
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace propel

#endif  // PROPEL_MLP_H_
