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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "propel/features.hpp"
#include "propel/rng.hpp"
#include "propel/scp.hpp"
#include "test_util.hpp"

namespace propel {
namespace {

using Refs = std::vector<std::pair<int, int>>;

Refs sorted(Refs r) {
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST_CASE("worked example: all demand-influence sets reproduce") {
  const ScpInstance inst = testutil::worked_example_scp();
  ScpBuildOptions opts;
  opts.demand_window = true;
  const MipInstance mip = build_scp_mip(inst, opts);
  const DirectedScpGraph g(mip, inst.topology);

  // Products: 0 due in period 0, 1 and 2 due in period 1.
  CHECK(sorted(g.extract("z[0,0]").demand_refs) ==
        Refs{{0, 0}, {1, 1}, {2, 1}});
  CHECK(sorted(g.extract("x[0,0]").demand_refs) == Refs{{0, 0}});
  // Late production can no longer serve product 0's past due date; its own
  // period stands in for the expired demand.
  CHECK(sorted(g.extract("z[0,1]").demand_refs) ==
        Refs{{0, 1}, {1, 1}, {2, 1}});
  CHECK(sorted(g.extract("x[1,0]").demand_refs) == Refs{{1, 1}});
  CHECK(sorted(g.extract("x[1,1]").demand_refs) == Refs{{1, 1}});
  CHECK(g.extract("x[0,1]").demand_refs.empty());
  CHECK(sorted(g.extract("x[2,1]").demand_refs) == Refs{{2, 1}});
}

TEST_CASE("arcs follow material flow and never point backwards in time") {
  const ScpInstance inst = testutil::worked_example_scp();
  ScpBuildOptions opts;
  opts.demand_window = true;
  const MipInstance mip = build_scp_mip(inst, opts);
  const DirectedScpGraph g(mip, inst.topology);

  CHECK(g.has_arc("z[0,0]", "bal[0,0]"));
  CHECK(g.has_arc("bal[0,0]", "x[1,0]"));
  CHECK(g.has_arc("x[1,0]", "dem[1,1]"));
  CHECK_FALSE(g.has_arc("bal[0,0]", "z[0,0]"));
  CHECK(g.path_exists("z[0,0]", "dem[2,1]"));
  // Nothing flows from the second period back into the first.
  CHECK_FALSE(g.path_exists("z[0,1]", "dem[0,0]"));
  CHECK_FALSE(g.path_exists("x[2,1]", "bal[0,0]"));
}

TEST_CASE("per-period demand rows give each consumption its own reference") {
  const ScpInstance inst = testutil::micro_scp();
  const MipInstance mip = build_scp_mip(inst);
  const DirectedScpGraph g(mip, inst.topology);
  CHECK(sorted(g.extract("x[0,0]").demand_refs) == Refs{{0, 0}});
  CHECK(sorted(g.extract("z[0,0]").demand_refs) == Refs{{0, 0}});
}

TEST_CASE("production references every period it can still serve") {
  ScpInstance inst = testutil::micro_scp();
  inst.topology.num_periods = 3;
  inst.demand = {{1, 1, 2}};
  inst.capacity = {{2.0, 2.0, 2.0}};
  inst.inv_cost = {{1.0, 1.0, 1.0}};
  inst.prod_cost = {{1.0, 1.0, 1.0}};
  inst.unmet_penalty = {{10.0, 10.0, 10.0}};
  const MipInstance mip = build_scp_mip(inst);
  const DirectedScpGraph g(mip, inst.topology);
  // First-period production can feed all three periods through inventory;
  // last-period production only its own.
  CHECK(sorted(g.extract("z[0,0]").demand_refs) ==
        Refs{{0, 0}, {0, 1}, {0, 2}});
  CHECK(sorted(g.extract("z[0,2]").demand_refs) == Refs{{0, 2}});
  // Coverage only shrinks as the horizon advances.
  const Refs early = sorted(g.extract("z[0,0]").demand_refs);
  const Refs late = sorted(g.extract("z[0,1]").demand_refs);
  CHECK(std::includes(early.begin(), early.end(), late.begin(), late.end()));
}

TEST_CASE("feature set covers exactly the integer variables") {
  const ScpInstance inst = testutil::worked_example_scp();
  const MipInstance mip = build_scp_mip(inst);
  const FeatureSet fs = build_feature_set(mip, inst.topology);
  int n_int = 0;
  for (const Variable& v : mip.vars) n_int += v.is_integer;
  CHECK(static_cast<int>(fs.specs.size()) == n_int);
  CHECK(fs.var_names.size() == fs.specs.size());
  CHECK(fs.fixed_length >= 1);
  for (const FeatureSpec& spec : fs.specs) {
    CHECK(static_cast<int>(spec.demand_refs.size()) <= fs.fixed_length);
  }
}

TEST_CASE("assemble normalizes, pads with zeros, and drops earliest first") {
  ScpInstance inst = testutil::micro_scp();
  inst.demand = {{8}};
  FeatureSpec spec;
  spec.var_name = "z[0,0]";
  spec.demand_refs = {{0, 0}};
  spec.fixed_length = 3;
  const std::vector<double> v = assemble_vector(spec, inst, 16.0);
  CHECK(v == std::vector<double>{0.5, 0.0, 0.0});

  // Over-long spec: the earliest period is sacrificed, order kept.
  ScpInstance wide = testutil::micro_scp();
  wide.topology.num_periods = 3;
  wide.demand = {{1, 2, 3}};
  wide.capacity = {{2.0, 2.0, 2.0}};
  wide.inv_cost = {{1.0, 1.0, 1.0}};
  wide.prod_cost = {{1.0, 1.0, 1.0}};
  wide.unmet_penalty = {{10.0, 10.0, 10.0}};
  FeatureSpec long_spec;
  long_spec.var_name = "z[0,0]";
  long_spec.demand_refs = {{0, 0}, {0, 1}, {0, 2}};
  long_spec.fixed_length = 2;
  CHECK(assemble_vector(long_spec, wide, 1.0) ==
        std::vector<double>{2.0, 3.0});
}

TEST_CASE("demand outside a spec never changes its vector") {
  const ScpInstance base = testutil::worked_example_scp();
  const MipInstance mip = build_scp_mip(base);
  FeatureSet fs = build_feature_set(mip, base.topology);
  calibrate_normalizer(fs, {base});

  ScpInstance tweaked = base;
  tweaked.demand[2][1] += 1;  // product 2 only
  for (std::size_t k = 0; k < fs.specs.size(); ++k) {
    const auto& refs = fs.specs[k].demand_refs;
    const bool touches = std::any_of(
        refs.begin(), refs.end(),
        [](const std::pair<int, int>& r) { return r.first == 2; });
    const auto a = assemble_vector(fs.specs[k], base, fs.normalizer);
    const auto b = assemble_vector(fs.specs[k], tweaked, fs.normalizer);
    if (!touches) CHECK(a == b);
  }
}

TEST_CASE("normalizer calibration takes the maximum observed demand") {
  const ScpInstance inst = testutil::worked_example_scp();
  const MipInstance mip = build_scp_mip(inst);
  FeatureSet fs = build_feature_set(mip, inst.topology);
  calibrate_normalizer(fs, {inst});
  CHECK(fs.normalizer == doctest::Approx(4.0));
}

TEST_CASE("feature set json round trip and hash stability") {
  const ScpInstance inst = testutil::worked_example_scp();
  const MipInstance mip = build_scp_mip(inst);
  FeatureSet fs = build_feature_set(mip, inst.topology);
  calibrate_normalizer(fs, {inst});

  const FeatureSet back = feature_set_from_json(feature_set_to_json(fs));
  CHECK(feature_set_to_json(back) == feature_set_to_json(fs));
  CHECK(feature_set_hash(back) == feature_set_hash(fs));

  FeatureSet changed = fs;
  changed.specs[0].demand_refs.push_back({0, 1});
  CHECK(feature_set_hash(changed) != feature_set_hash(fs));
  // The normalizer is data, not structure; it does not enter the hash.
  FeatureSet renorm = fs;
  renorm.normalizer *= 2.0;
  CHECK(feature_set_hash(renorm) == feature_set_hash(fs));
}

TEST_CASE("padded length sits at the 95th percentile of raw lengths") {
  Rng rng(31);
  const ScpInstance inst = testutil::random_micro_scp(rng);
  const MipInstance mip = build_scp_mip(inst);
  const FeatureSet fs = build_feature_set(mip, inst.topology);
  std::vector<int> lens;
  const DirectedScpGraph g(mip, inst.topology);
  for (const std::string& name : fs.var_names) {
    lens.push_back(static_cast<int>(g.extract(name).demand_refs.size()));
  }
  std::sort(lens.begin(), lens.end());
  const std::size_t rank =
      (lens.size() * 95 + 99) / 100;  // nearest-rank, 1-based
  CHECK(fs.fixed_length == std::max(1, lens[rank - 1]));
}

}  // namespace propel
