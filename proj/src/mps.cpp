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

#include "propel/mps.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace propel {

namespace {

// Shortest round-trip decimal representation; keeps the second
// export -> parse -> export cycle byte-stable.
std::string format_number(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

std::string export_mps(const MipInstance& mip) {
  ValidationReport report = validate(mip);
  if (!report.ok()) {
    throw MpsError("cannot export invalid instance: " + report.violations[0]);
  }
  for (const Variable& v : mip.vars) {
    if (v.name.empty()) throw MpsError("cannot export unnamed variable");
  }
  for (const Constraint& c : mip.cons) {
    if (c.name.empty()) throw MpsError("cannot export unnamed constraint");
  }

  std::ostringstream out;
  out << "NAME " << (mip.name.empty() ? "mip" : mip.name) << "\n";
  if (mip.sense == Sense::kMaximize) {
    out << "OBJSENSE\n MAX\n";
  }
  out << "ROWS\n";
  out << " N OBJ\n";
  for (const Constraint& c : mip.cons) {
    const char tag = c.sense == RowSense::kLessEqual      ? 'L'
                     : c.sense == RowSense::kGreaterEqual ? 'G'
                                                          : 'E';
    out << " " << tag << " " << c.name << "\n";
  }

  // Column-major entries. Every variable gets an explicit OBJ entry so that
  // columns appearing in no constraint still exist after a round trip.
  std::vector<std::vector<std::pair<std::string, double>>> col_entries(
      mip.num_vars());
  for (int i = 0; i < mip.num_vars(); ++i) {
    col_entries[i].emplace_back("OBJ", mip.vars[i].obj_coeff);
  }
  for (const Constraint& c : mip.cons) {
    for (const auto& [i, coeff] : c.terms) {
      if (coeff != 0.0) col_entries[i].emplace_back(c.name, coeff);
    }
  }

  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker_id = 0;
  for (int i = 0; i < mip.num_vars(); ++i) {
    const Variable& v = mip.vars[i];
    if (v.is_integer != in_integer_block) {
      out << " MARKER" << marker_id++ << " 'MARKER' '"
          << (v.is_integer ? "INTORG" : "INTEND") << "'\n";
      in_integer_block = v.is_integer;
    }
    for (const auto& [row, coeff] : col_entries[i]) {
      out << " " << v.name << " " << row << " " << format_number(coeff)
          << "\n";
    }
  }
  if (in_integer_block) {
    out << " MARKER" << marker_id++ << " 'MARKER' 'INTEND'\n";
  }

  out << "RHS\n";
  for (const Constraint& c : mip.cons) {
    if (c.rhs != 0.0) {
      out << " RHS " << c.name << " " << format_number(c.rhs) << "\n";
    }
  }

  // Bounds are always explicit; integer-column defaults vary across readers.
  out << "BOUNDS\n";
  for (const Variable& v : mip.vars) {
    if (v.lb == v.ub) {
      out << " FX BND " << v.name << " " << format_number(v.lb) << "\n";
      continue;
    }
    out << " LO BND " << v.name << " " << format_number(v.lb) << "\n";
    if (v.ub == kInfinity) {
      out << " PL BND " << v.name << "\n";
    } else {
      out << " UP BND " << v.name << " " << format_number(v.ub) << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

MipInstance parse_mps(const std::string& text) {
  MipInstance mip;
  mip.sense = Sense::kMinimize;

  enum class Section { kNone, kObjsense, kRows, kColumns, kRhs, kRanges,
                       kBounds, kDone };
  Section section = Section::kNone;

  std::string obj_row;
  std::unordered_map<std::string, int> row_index;
  std::unordered_map<std::string, int> col_index;
  bool integer_block = false;

  auto get_col = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int idx = mip.num_vars();
    col_index.emplace(name, idx);
    Variable v;
    v.name = name;
    v.is_integer = integer_block;
    mip.vars.push_back(std::move(v));
    return idx;
  };
  auto to_double = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      throw MpsError("bad numeric field '" + s + "'");
    }
    return v;
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      // Section header line.
      const std::string& head = tok[0];
      if (head == "NAME") {
        if (tok.size() > 1) mip.name = tok[1];
      } else if (head == "OBJSENSE") {
        section = Section::kObjsense;
        if (tok.size() > 1) {
          mip.sense = tok[1] == "MAX" || tok[1] == "MAXIMIZE"
                          ? Sense::kMaximize
                          : Sense::kMinimize;
          section = Section::kNone;
        }
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "RANGES") {
        section = Section::kRanges;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        section = Section::kDone;
        break;
      } else {
        throw MpsError("unknown MPS section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kObjsense:
        mip.sense = tok[0] == "MAX" || tok[0] == "MAXIMIZE"
                        ? Sense::kMaximize
                        : Sense::kMinimize;
        break;
      case Section::kRows: {
        if (tok.size() < 2) throw MpsError("short ROWS line: " + line);
        const std::string& type = tok[0];
        const std::string& name = tok[1];
        if (type == "N") {
          if (obj_row.empty()) obj_row = name;
          break;
        }
        Constraint c;
        c.name = name;
        c.sense = type == "L"   ? RowSense::kLessEqual
                  : type == "G" ? RowSense::kGreaterEqual
                  : type == "E" ? RowSense::kEqual
                                : throw MpsError("bad row type '" + type + "'");
        row_index.emplace(name, mip.num_cons());
        mip.cons.push_back(std::move(c));
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          integer_block = tok[2] == "'INTORG'";
          break;
        }
        if (tok.size() < 3 || tok.size() % 2 == 0) {
          throw MpsError("short COLUMNS line: " + line);
        }
        const int col = get_col(tok[0]);
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const std::string& row = tok[k];
          const double coeff = to_double(tok[k + 1]);
          if (row == obj_row) {
            mip.vars[col].obj_coeff = coeff;
          } else {
            auto it = row_index.find(row);
            if (it == row_index.end()) {
              throw MpsError("COLUMNS references unknown row '" + row + "'");
            }
            if (coeff != 0.0) {
              mip.cons[it->second].terms.emplace_back(col, coeff);
            }
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() < 3) throw MpsError("short RHS line: " + line);
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          if (tok[k] == obj_row) continue;  // objective offset unsupported
          auto it = row_index.find(tok[k]);
          if (it == row_index.end()) {
            throw MpsError("RHS references unknown row '" + tok[k] + "'");
          }
          mip.cons[it->second].rhs = to_double(tok[k + 1]);
        }
        break;
      }
      case Section::kRanges:
        throw MpsError("RANGES section not supported");
      case Section::kBounds: {
        if (tok.size() < 3) throw MpsError("short BOUNDS line: " + line);
        const std::string& type = tok[0];
        const int col = get_col(tok[2]);
        Variable& v = mip.vars[col];
        if (type == "UP" || type == "UI") {
          v.ub = to_double(tok.at(3));
        } else if (type == "LO" || type == "LI") {
          v.lb = to_double(tok.at(3));
        } else if (type == "FX") {
          v.lb = v.ub = to_double(tok.at(3));
        } else if (type == "BV") {
          v.lb = 0.0;
          v.ub = 1.0;
          v.is_integer = true;
        } else if (type == "MI") {
          v.lb = -kInfinity;
        } else if (type == "PL") {
          v.ub = kInfinity;
        } else {
          throw MpsError("bad bound type '" + type + "'");
        }
        break;
      }
      default:
        throw MpsError("data line outside of any section: " + line);
    }
  }
  if (section != Section::kDone) throw MpsError("missing ENDATA");

  // Terms were appended in row-scan order within each column; restore the
  // sorted-by-index invariant.
  for (Constraint& c : mip.cons) {
    std::sort(c.terms.begin(), c.terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return mip;
}

}  // namespace propel
