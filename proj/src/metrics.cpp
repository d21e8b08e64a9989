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

#include "propel/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace propel {

GapTrace make_trace(const MipResult& res, double lp_star, double horizon) {
  GapTrace trace;
  trace.lp_star = lp_star;
  trace.horizon = horizon;
  for (const auto& e : res.trace) {
    if (e.first <= horizon) trace.entries.push_back(e);
  }
  return trace;
}

double primal_gap(double obj, double lp_star) {
  const double ao = std::abs(obj);
  const double al = std::abs(lp_star);
  if (ao == 0.0 && al == 0.0) return 0.0;
  if (obj * lp_star < 0.0) return 1.0;
  return std::abs(obj - lp_star) / std::max(ao, al);
}

double gap_at(const GapTrace& trace, double t) {
  if (t < 0.0 || t > trace.horizon) {
    throw std::invalid_argument("query time outside trace horizon");
  }
  double gap = 1.0;  // before any incumbent
  for (const auto& [ti, obj] : trace.entries) {
    if (ti > t) break;
    gap = primal_gap(obj, trace.lp_star);
  }
  return gap;
}

double primal_integral(const GapTrace& trace, double T) {
  if (T < 0.0 || T > trace.horizon) {
    throw std::invalid_argument("integration horizon outside trace");
  }
  double total = 0.0;
  double prev_t = 0.0;
  double prev_gap = 1.0;
  for (const auto& [ti, obj] : trace.entries) {
    if (ti >= T) break;
    total += prev_gap * (std::max(ti, 0.0) - prev_t);
    prev_t = std::max(ti, 0.0);
    prev_gap = primal_gap(obj, trace.lp_star);
  }
  total += prev_gap * (T - prev_t);
  return total;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "instance,method,pi,pg,rt,n_fixed,n_int\n";
  out.precision(17);
  for (const ResultRow& r : rows) {
    out << r.instance << ',' << r.method << ',' << r.pi << ',' << r.pg << ','
        << r.rt << ',' << r.n_fixed << ',' << r.n_int << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ResultRow> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "instance,method,pi,pg,rt,n_fixed,n_int") {
        throw std::runtime_error("results CSV: bad header at row 1");
      }
      continue;
    }
    std::istringstream ls(line);
    ResultRow r;
    std::string field;
    try {
      if (!std::getline(ls, r.instance, ',')) throw std::runtime_error("");
      if (!std::getline(ls, r.method, ',')) throw std::runtime_error("");
      if (!std::getline(ls, field, ',')) throw std::runtime_error("");
      r.pi = std::stod(field);
      if (!std::getline(ls, field, ',')) throw std::runtime_error("");
      r.pg = std::stod(field);
      if (!std::getline(ls, field, ',')) throw std::runtime_error("");
      r.rt = std::stod(field);
      if (!std::getline(ls, field, ',')) throw std::runtime_error("");
      r.n_fixed = std::stoi(field);
      if (!std::getline(ls, field)) throw std::runtime_error("");
      r.n_int = std::stoi(field);
    } catch (const std::exception&) {
      throw std::runtime_error("results CSV: malformed row " +
                               std::to_string(lineno));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace propel
