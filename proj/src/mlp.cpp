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

#include "propel/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace propel {
namespace {

int param_count(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("network needs at least two layers");
  }
  int n = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    if (sizes[l - 1] <= 0 || sizes[l] <= 0) {
      throw std::invalid_argument("layer sizes must be positive");
    }
    n += sizes[l] * sizes[l - 1] + sizes[l];
  }
  return n;
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, Rng& rng) : sizes_(std::move(sizes)) {
  params_.resize(param_count(sizes_));
  std::size_t p = 0;
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    const int fan_in = sizes_[l - 1];
    const double scale = std::sqrt(2.0 / fan_in);
    for (int k = 0; k < sizes_[l] * fan_in; ++k) {
      params_[p++] = scale * rng.normal();
    }
    p += static_cast<std::size_t>(sizes_[l]);  // biases stay zero
  }
}

Mlp::Mlp(std::vector<int> sizes, std::vector<double> params)
    : sizes_(std::move(sizes)), params_(std::move(params)) {
  if (static_cast<int>(params_.size()) != param_count(sizes_)) {
    throw std::invalid_argument("parameter vector does not match layer sizes");
  }
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  return forward(x, nullptr);
}

std::vector<double> Mlp::forward(const std::vector<double>& x,
                                 Cache* cache) const {
  if (static_cast<int>(x.size()) != sizes_.front()) {
    throw std::invalid_argument("input size mismatch");
  }
  std::vector<double> cur = x;
  if (cache) {
    cache->act.clear();
    cache->act.push_back(cur);
  }
  std::size_t p = 0;
  const std::size_t L = sizes_.size() - 1;
  for (std::size_t l = 1; l <= L; ++l) {
    const int in = sizes_[l - 1];
    const int out = sizes_[l];
    std::vector<double> next(static_cast<std::size_t>(out));
    for (int r = 0; r < out; ++r) {
      double s = 0.0;
      const double* w = &params_[p + static_cast<std::size_t>(r) * in];
      for (int c = 0; c < in; ++c) s += w[c] * cur[c];
      next[r] = s;
    }
    p += static_cast<std::size_t>(out) * in;
    for (int r = 0; r < out; ++r) next[r] += params_[p + r];
    p += static_cast<std::size_t>(out);
    if (l < L) {
      for (double& v : next) v = std::max(0.0, v);
    }
    cur = std::move(next);
    if (cache) cache->act.push_back(cur);
  }
  return cur;
}

std::vector<double> Mlp::backward(const Cache& cache,
                                  const std::vector<double>& dout,
                                  std::vector<double>* grad) const {
  if (grad->size() != params_.size()) grad->resize(params_.size(), 0.0);
  const std::size_t L = sizes_.size() - 1;
  if (cache.act.size() != L + 1) {
    throw std::invalid_argument("cache does not match network depth");
  }
  std::vector<double> delta = dout;

  // Offsets of each layer's weight block.
  std::vector<std::size_t> w_off(L + 1, 0);
  std::size_t p = 0;
  for (std::size_t l = 1; l <= L; ++l) {
    w_off[l] = p;
    p += static_cast<std::size_t>(sizes_[l]) * sizes_[l - 1] + sizes_[l];
  }

  for (std::size_t l = L; l >= 1; --l) {
    const int in = sizes_[l - 1];
    const int out = sizes_[l];
    const std::vector<double>& a_prev = cache.act[l - 1];
    // ReLU derivative on hidden layers: the stored activation is the
    // post-ReLU value, zero exactly where the unit was clamped.
    if (l < L) {
      for (int r = 0; r < out; ++r) {
        if (cache.act[l][r] <= 0.0) delta[r] = 0.0;
      }
    }
    const std::size_t wp = w_off[l];
    const std::size_t bp = wp + static_cast<std::size_t>(out) * in;
    std::vector<double> dprev(static_cast<std::size_t>(in), 0.0);
    for (int r = 0; r < out; ++r) {
      const double d = delta[r];
      double* gw = &(*grad)[wp + static_cast<std::size_t>(r) * in];
      const double* w = &params_[wp + static_cast<std::size_t>(r) * in];
      for (int c = 0; c < in; ++c) {
        gw[c] += d * a_prev[c];
        dprev[c] += d * w[c];
      }
      (*grad)[bp + r] += d;
    }
    delta = std::move(dprev);
  }
  return delta;
}

nlohmann::ordered_json Mlp::to_json() const {
  nlohmann::ordered_json j;
  j["sizes"] = sizes_;
  j["params"] = params_;
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  return Mlp(j.at("sizes").get<std::vector<int>>(),
             j.at("params").get<std::vector<double>>());
}

Adam::Adam(int num_params, double lr)
    : lr_(lr), m_(static_cast<std::size_t>(num_params), 0.0),
      v_(static_cast<std::size_t>(num_params), 0.0) {}

void Adam::step(std::vector<double>& params,
                const std::vector<double>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("optimizer size mismatch");
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++t_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
  }
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace propel
