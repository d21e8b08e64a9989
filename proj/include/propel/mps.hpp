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

#ifndef PROPEL_MPS_H_
#define PROPEL_MPS_H_

#include <stdexcept>
#include <string>

#include "propel/mip.hpp"

namespace propel {

class MpsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Free-format MPS. Integer variables are wrapped in MARKER INTORG/INTEND
// blocks; maximization instances carry an OBJSENSE MAX section.
// Throws MpsError on invalid instances (unnamed variables, validation
// failures).
std::string export_mps(const MipInstance& mip);

// Parses free-format MPS text (the subset emitted by export_mps plus common
// bound types UP/LO/FX/BV/MI/PL/UI/LI). Throws MpsError on malformed input.
MipInstance parse_mps(const std::string& text);

}  // namespace propel

#endif  // PROPEL_MPS_H_
