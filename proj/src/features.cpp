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

#include "propel/features.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <stdexcept>

namespace propel {
namespace {

struct Tag {
  char role = 0;
  int a = -1;
  int b = -1;
};

Tag parse_tag(const std::string& name, bool is_con) {
  char role[8];
  int a = -1;
  int b = -1;
  if (std::sscanf(name.c_str(), "%7[a-z][%d,%d]", role, &a, &b) != 3 ||
      a < 0 || b < 0) {
    throw std::invalid_argument("unrecognized planning name: " + name);
  }
  const std::string r(role);
  char code = 0;
  if (!is_con) {
    if (r == "z" || r == "x" || r == "y" || r == "u") code = r[0];
  } else {
    if (r == "bal") code = 'b';
    if (r == "dem") code = 'd';
    if (r == "cap") code = 'c';
  }
  if (code == 0) {
    throw std::invalid_argument("unrecognized planning name: " + name);
  }
  return {code, a, b};
}

}  // namespace

DirectedScpGraph::DirectedScpGraph(const MipInstance& mip,
                                   const ScpTopology& topo)
    : topo_(&topo) {
  const int n = mip.num_vars();
  const int m = mip.num_cons();
  nodes_.resize(n + m);
  names_.resize(n + m);
  arcs_.resize(n + m);
  for (int i = 0; i < n; ++i) {
    const Tag t = parse_tag(mip.vars[i].name, false);
    nodes_[i] = {t.role, t.a, t.b, false};
    names_[i] = mip.vars[i].name;
  }
  for (int c = 0; c < m; ++c) {
    const Tag t = parse_tag(mip.cons[c].name, true);
    nodes_[n + c] = {t.role, t.a, t.b, true};
    names_[n + c] = mip.cons[c].name;
  }

  auto add_arc = [this](int from, int to) {
    // Influence never flows backwards in time.
    if (nodes_[to].period < nodes_[from].period) {
      throw std::invalid_argument("arc " + names_[from] + " -> " +
                                  names_[to] + " runs backwards in time");
    }
    arcs_[from].push_back(to);
  };

  for (int c = 0; c < m; ++c) {
    const int cn = n + c;
    const char role = nodes_[cn].role;
    for (const auto& [vi, coeff] : mip.cons[c].terms) {
      if (role == 'b') {
        // Balance rows: supply terms feed the row, the row feeds the
        // consumption and carried inventory it enables.
        if (coeff > 0.0) {
          add_arc(vi, cn);
        } else {
          add_arc(cn, vi);
        }
      } else {
        // Demand and capacity rows are sinks.
        add_arc(vi, cn);
      }
    }
  }
}

int DirectedScpGraph::node_id(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (names_[i] == name) return i;
  }
  throw std::invalid_argument("unknown node: " + name);
}

bool DirectedScpGraph::has_arc(const std::string& from,
                               const std::string& to) const {
  const int f = node_id(from);
  const int t = node_id(to);
  return std::find(arcs_[f].begin(), arcs_[f].end(), t) != arcs_[f].end();
}

bool DirectedScpGraph::path_exists(const std::string& from,
                                   const std::string& to) const {
  const int src = node_id(from);
  const int dst = node_id(to);
  std::vector<char> seen(nodes_.size(), 0);
  std::deque<int> queue{src};
  seen[src] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (v == dst) return true;
    for (int w : arcs_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return false;
}

FeatureSpec DirectedScpGraph::extract(const std::string& var_name) const {
  const int src = node_id(var_name);
  const Node& var = nodes_[src];

  std::vector<char> seen(nodes_.size(), 0);
  std::deque<int> queue{src};
  seen[src] = 1;
  std::set<std::pair<int, int>> refs;  // (period, product)
  std::set<int> products_hit;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (nodes_[v].is_con && nodes_[v].role == 'd') {
      refs.insert({nodes_[v].period, nodes_[v].entity});
      products_hit.insert(nodes_[v].entity);
      continue;
    }
    for (int w : arcs_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }

  // A production variable for a product whose demand row lies entirely in
  // the past still depends on that product's demand in its own period.
  if (var.role == 'z') {
    for (int i : topo_->satisfies[var.entity]) {
      if (!products_hit.count(i)) refs.insert({var.period, i});
    }
  }

  FeatureSpec spec;
  spec.var_name = var_name;
  for (const auto& [t, i] : refs) spec.demand_refs.emplace_back(i, t);
  return spec;
}

FeatureSet build_feature_set(const MipInstance& mip, const ScpTopology& topo) {
  DirectedScpGraph graph(mip, topo);
  FeatureSet fs;
  for (const Variable& v : mip.vars) {
    if (!v.is_integer) continue;
    fs.specs.push_back(graph.extract(v.name));
    fs.var_names.push_back(v.name);
  }
  std::vector<int> lengths;
  lengths.reserve(fs.specs.size());
  for (const FeatureSpec& s : fs.specs) {
    lengths.push_back(static_cast<int>(s.demand_refs.size()));
  }
  std::sort(lengths.begin(), lengths.end());
  int cap = 1;
  if (!lengths.empty()) {
    // Nearest-rank 95th percentile.
    const auto k = static_cast<std::size_t>(
        (lengths.size() * 95 + 99) / 100);
    cap = std::max(1, lengths[k == 0 ? 0 : k - 1]);
  }
  fs.fixed_length = cap;
  for (FeatureSpec& s : fs.specs) s.fixed_length = cap;
  return fs;
}

void calibrate_normalizer(FeatureSet& fs,
                          const std::vector<ScpInstance>& instances) {
  double mx = 0.0;
  for (const ScpInstance& inst : instances) {
    for (const auto& row : inst.demand) {
      for (int d : row) mx = std::max(mx, static_cast<double>(d));
    }
  }
  fs.normalizer = mx > 0.0 ? mx : 1.0;
}

std::vector<double> assemble_vector(const FeatureSpec& spec,
                                    const ScpInstance& inst,
                                    double normalizer) {
  if (normalizer <= 0.0) {
    throw std::invalid_argument("normalizer must be positive");
  }
  const int len = spec.fixed_length > 0
                      ? spec.fixed_length
                      : static_cast<int>(spec.demand_refs.size());
  std::size_t first = 0;
  if (static_cast<int>(spec.demand_refs.size()) > len) {
    // Refs are period-sorted; drop the earliest periods.
    first = spec.demand_refs.size() - static_cast<std::size_t>(len);
  }
  std::vector<double> out(static_cast<std::size_t>(len), 0.0);
  for (std::size_t k = first; k < spec.demand_refs.size(); ++k) {
    const auto& [i, t] = spec.demand_refs[k];
    if (i < 0 || i >= static_cast<int>(inst.demand.size()) || t < 0 ||
        t >= static_cast<int>(inst.demand[i].size())) {
      throw std::invalid_argument("feature reference outside demand array");
    }
    out[k - first] = inst.demand[i][t] / normalizer;
  }
  return out;
}

nlohmann::ordered_json feature_set_to_json(const FeatureSet& fs) {
  nlohmann::ordered_json j;
  j["fixed_length"] = fs.fixed_length;
  j["normalizer"] = fs.normalizer;
  j["specs"] = nlohmann::ordered_json::array();
  for (const FeatureSpec& s : fs.specs) {
    nlohmann::ordered_json js;
    js["var"] = s.var_name;
    js["refs"] = nlohmann::ordered_json::array();
    for (const auto& [i, t] : s.demand_refs) {
      js["refs"].push_back({i, t});
    }
    j["specs"].push_back(std::move(js));
  }
  return j;
}

FeatureSet feature_set_from_json(const nlohmann::json& j) {
  FeatureSet fs;
  fs.fixed_length = j.at("fixed_length").get<int>();
  fs.normalizer = j.at("normalizer").get<double>();
  for (const auto& js : j.at("specs")) {
    FeatureSpec s;
    s.var_name = js.at("var").get<std::string>();
    s.fixed_length = fs.fixed_length;
    for (const auto& r : js.at("refs")) {
      s.demand_refs.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
    }
    fs.var_names.push_back(s.var_name);
    fs.specs.push_back(std::move(s));
  }
  return fs;
}

std::uint64_t feature_set_hash(const FeatureSet& fs) {
  // FNV-1a over the structural part; the normalizer is calibration data and
  // does not change identity.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t fl = fs.fixed_length;
  mix(&fl, sizeof(fl));
  for (const FeatureSpec& s : fs.specs) {
    mix(s.var_name.data(), s.var_name.size());
    for (const auto& [i, t] : s.demand_refs) {
      const std::int32_t buf[2] = {i, t};
      mix(buf, sizeof(buf));
    }
  }
  return h;
}

}  // namespace propel
