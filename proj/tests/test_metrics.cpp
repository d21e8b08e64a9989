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

#include <cmath>

#include "propel/metrics.hpp"
#include "propel/rng.hpp"

namespace propel {
namespace {

GapTrace trace_of(double lp_star,
                  std::vector<std::pair<double, double>> entries,
                  double horizon) {
  GapTrace t;
  t.lp_star = lp_star;
  t.entries = std::move(entries);
  t.horizon = horizon;
  return t;
}

// Riemann-sum cross-check for the closed-form integral.
double quadrature(const GapTrace& trace, double T, int steps) {
  double sum = 0.0;
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    sum += gap_at(trace, (k + 0.5) * h) * h;
  }
  return sum;
}

}  // namespace

TEST_CASE("primal gap unit cases") {
  CHECK(primal_gap(0.0, 0.0) == 0.0);
  CHECK(primal_gap(-5.0, 3.0) == 1.0);
  CHECK(primal_gap(3.0, -5.0) == 1.0);
  CHECK(primal_gap(110.0, 100.0) == doctest::Approx(10.0 / 110.0));
  CHECK(primal_gap(100.0, 110.0) == doctest::Approx(10.0 / 110.0));
  CHECK(primal_gap(7.0, 7.0) == 0.0);
  // One-sided zero: gap is the full relative distance.
  CHECK(primal_gap(0.0, 4.0) == doctest::Approx(1.0));
}

TEST_CASE("primal gap stays within the unit interval") {
  Rng rng(61);
  for (int k = 0; k < 1000; ++k) {
    const double g = primal_gap(rng.normal(0.0, 100.0),
                                rng.normal(0.0, 100.0));
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("gap over time is a right-continuous step function") {
  const GapTrace empty = trace_of(100.0, {}, 10.0);
  CHECK(gap_at(empty, 0.0) == 1.0);
  CHECK(gap_at(empty, 10.0) == 1.0);

  const GapTrace perfect = trace_of(100.0, {{0.0, 100.0}}, 10.0);
  CHECK(gap_at(perfect, 0.0) == 0.0);
  CHECK(gap_at(perfect, 7.0) == 0.0);

  const GapTrace steps =
      trace_of(100.0, {{2.0, 200.0}, {5.0, 125.0}}, 10.0);
  CHECK(gap_at(steps, 1.9) == 1.0);
  CHECK(gap_at(steps, 2.0) == doctest::Approx(0.5));
  CHECK(gap_at(steps, 4.9) == doctest::Approx(0.5));
  CHECK(gap_at(steps, 5.0) == doctest::Approx(0.2));
  CHECK(gap_at(steps, 10.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS((void)gap_at(steps, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)gap_at(steps, 10.1), std::invalid_argument);
}

TEST_CASE("primal integral unit cases") {
  CHECK(primal_integral(trace_of(100.0, {}, 10.0), 10.0) ==
        doctest::Approx(10.0));
  CHECK(primal_integral(trace_of(100.0, {{0.0, 100.0}}, 10.0), 10.0) ==
        doctest::Approx(0.0));
  // p = 1 on [0,2), 0.5 afterwards: 2*1 + 2*0.5 = 3.
  const GapTrace half = trace_of(100.0, {{2.0, 200.0}}, 4.0);
  CHECK(primal_integral(half, 4.0) == doctest::Approx(3.0));
}

TEST_CASE("primal integral is bounded and nondecreasing in the horizon") {
  Rng rng(62);
  for (int k = 0; k < 50; ++k) {
    GapTrace trace = trace_of(50.0, {}, 20.0);
    double t = 0.0;
    const int n = static_cast<int>(rng.uniform_int(6));
    for (int e = 0; e < n; ++e) {
      t += rng.uniform(0.0, 4.0);
      trace.entries.push_back({t, rng.uniform(50.0, 200.0)});
    }
    trace.horizon = 20.0;
    double prev = 0.0;
    for (double T : {5.0, 10.0, 20.0}) {
      const double pi = primal_integral(trace, T);
      CHECK(pi >= prev - 1e-12);
      CHECK(pi <= T + 1e-12);
      prev = pi;
    }
  }
}

TEST_CASE("closed form matches quadrature on random traces") {
  Rng rng(63);
  for (int k = 0; k < 100; ++k) {
    GapTrace trace = trace_of(rng.uniform(10.0, 100.0), {}, 16.0);
    double t = 0.0;
    const int n = static_cast<int>(rng.uniform_int(5));
    for (int e = 0; e < n; ++e) {
      t += rng.uniform(0.1, 4.0);
      trace.entries.push_back({t, rng.uniform(-50.0, 250.0)});
    }
    const double T = 16.0;
    // Entry times are generic reals, so a fine midpoint rule converges to
    // the exact piecewise integral.
    CHECK(primal_integral(trace, T) ==
          doctest::Approx(quadrature(trace, T, 2000000)).epsilon(1e-6));
  }
}

TEST_CASE("make_trace clips to the horizon and keeps lp_star") {
  MipResult res;
  res.status = MipStatus::kFeasible;
  res.trace = {{1.0, 9.0}, {5.0, 8.0}, {12.0, 7.0}};
  const GapTrace trace = make_trace(res, 6.0, 10.0);
  CHECK(trace.lp_star == 6.0);
  CHECK(trace.horizon == 10.0);
  REQUIRE(trace.entries.size() == 2);  // the 12.0 incumbent is beyond T
  CHECK(trace.entries[1].first == 5.0);
}

TEST_CASE("results csv round trip and error reporting") {
  std::vector<ResultRow> rows;
  rows.push_back({"inst-1", "OPT", 3.25, 0.125, 17.0, 0, 240});
  rows.push_back({"inst-1", "PROP", 1.0 / 3.0, 0.01, 11.0, 60, 240});
  const std::string text = results_csv(rows);
  CHECK(text.rfind("instance,method,pi,pg,rt,n_fixed,n_int\n", 0) == 0);
  const std::vector<ResultRow> back = parse_results_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].method == "OPT");
  CHECK(back[1].pi == rows[1].pi);  // full precision survives the trip
  CHECK(back[1].n_fixed == 60);

  CHECK_THROWS_WITH_AS((void)parse_results_csv("bogus header\n"),
                       doctest::Contains("header"), std::runtime_error);
  try {
    (void)parse_results_csv(
        "instance,method,pi,pg,rt,n_fixed,n_int\na,b,1,2,3,4,5\nbad,row\n");
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

}  // namespace propel
