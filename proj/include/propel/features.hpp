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

#ifndef PROPEL_FEATURES_H_
#define PROPEL_FEATURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "propel/mip.hpp"
#include "propel/scp.hpp"

namespace propel {

// Demand parameters that can influence one integer variable, ordered by
// (period, product).
struct FeatureSpec {
  std::string var_name;
  std::vector<std::pair<int, int>> demand_refs;  // (product, period)
  int fixed_length = 0;  // padded length; 0 = use raw length
};

// Directed version of the variable-constraint graph for planning MIPs.
// Arc direction follows material flow: supply-side variables point into
// their balance row, the row points at its consumption and inventory
// outflows, and consumption points at the demand rows it can serve. No arc
// ever runs from a later period to an earlier one.
class DirectedScpGraph {
 public:
  DirectedScpGraph(const MipInstance& mip, const ScpTopology& topo);

  // Demand rows reachable from `var_name` as (product, period) pairs. For
  // production variables, a servable product with no remaining demand row
  // contributes its demand at the variable's own period.
  FeatureSpec extract(const std::string& var_name) const;

  bool has_arc(const std::string& from, const std::string& to) const;
  bool path_exists(const std::string& from, const std::string& to) const;

 private:
  struct Node {
    char role = 0;  // variable: z x y u; constraint: b(al) d(em) c(ap)
    int entity = -1;
    int period = -1;
    bool is_con = false;
  };

  int node_id(const std::string& name) const;

  const ScpTopology* topo_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> arcs_;
  std::vector<std::string> names_;
};

// Per-instance feature machinery: one spec per integer variable of the
// instance, a shared padded length and a shared demand normalizer.
struct FeatureSet {
  std::vector<FeatureSpec> specs;       // aligned with integer-var order
  std::vector<std::string> var_names;   // integer variables, instance order
  double normalizer = 1.0;
  int fixed_length = 0;
};

// Builds specs for all integer variables. The padded length is capped at
// the 95th percentile of raw spec lengths; longer specs are truncated,
// earliest periods dropped first.
FeatureSet build_feature_set(const MipInstance& mip, const ScpTopology& topo);

// Sets the normalizer to the maximum demand observed across `instances`.
void calibrate_normalizer(FeatureSet& fs,
                          const std::vector<ScpInstance>& instances);

// Demand values in spec order, divided by the normalizer, truncated and
// zero-padded to the spec's fixed length.
std::vector<double> assemble_vector(const FeatureSpec& spec,
                                    const ScpInstance& inst,
                                    double normalizer);

nlohmann::ordered_json feature_set_to_json(const FeatureSet& fs);
FeatureSet feature_set_from_json(const nlohmann::json& j);

// Stable hash over the serialized specs; checkpoints refuse to load when it
// changes.
std::uint64_t feature_set_hash(const FeatureSet& fs);

}  // namespace propel

#endif  // PROPEL_FEATURES_H_
