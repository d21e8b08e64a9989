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

#include "propel/io.hpp"

#include <fstream>
#include <stdexcept>

namespace propel {

nlohmann::ordered_json mip_to_json(const MipInstance& mip) {
  nlohmann::ordered_json j;
  j["format"] = "propel-instance";
  j["version"] = 1;
  j["name"] = mip.name;
  j["sense"] = mip.sense == Sense::kMinimize ? "min" : "max";
  auto& vars = j["vars"] = nlohmann::ordered_json::array();
  for (const Variable& v : mip.vars) {
    nlohmann::ordered_json jv;
    jv["name"] = v.name;
    jv["lb"] = v.lb;
    if (v.ub == kInfinity) {
      jv["ub"] = nullptr;
    } else {
      jv["ub"] = v.ub;
    }
    jv["int"] = v.is_integer;
    jv["obj"] = v.obj_coeff;
    vars.push_back(std::move(jv));
  }
  auto& cons = j["cons"] = nlohmann::ordered_json::array();
  for (const Constraint& c : mip.cons) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["sense"] = c.sense == RowSense::kLessEqual      ? "<="
                  : c.sense == RowSense::kGreaterEqual ? ">="
                                                       : "=";
    jc["rhs"] = c.rhs;
    auto& terms = jc["terms"] = nlohmann::ordered_json::array();
    for (const auto& [i, coeff] : c.terms) {
      terms.push_back(nlohmann::ordered_json::array({i, coeff}));
    }
    cons.push_back(std::move(jc));
  }
  return j;
}

MipInstance mip_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "propel-instance") {
    throw std::runtime_error("not a propel-instance file");
  }
  MipInstance mip;
  mip.name = j.value("name", "");
  mip.sense =
      j.at("sense").get<std::string>() == "max" ? Sense::kMaximize
                                                : Sense::kMinimize;
  for (const auto& jv : j.at("vars")) {
    Variable v;
    v.name = jv.at("name").get<std::string>();
    v.lb = jv.at("lb").get<double>();
    v.ub = jv.at("ub").is_null() ? kInfinity : jv.at("ub").get<double>();
    v.is_integer = jv.at("int").get<bool>();
    v.obj_coeff = jv.at("obj").get<double>();
    mip.vars.push_back(std::move(v));
  }
  for (const auto& jc : j.at("cons")) {
    Constraint c;
    c.name = jc.at("name").get<std::string>();
    const std::string s = jc.at("sense").get<std::string>();
    c.sense = s == "<="   ? RowSense::kLessEqual
              : s == ">=" ? RowSense::kGreaterEqual
                          : RowSense::kEqual;
    c.rhs = jc.at("rhs").get<double>();
    for (const auto& term : jc.at("terms")) {
      c.terms.emplace_back(term.at(0).get<int>(), term.at(1).get<double>());
    }
    mip.cons.push_back(std::move(c));
  }
  return mip;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  return nlohmann::json::parse(read_text_file(path));
}

}  // namespace propel
