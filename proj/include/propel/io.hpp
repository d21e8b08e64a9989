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

#ifndef PROPEL_IO_H_
#define PROPEL_IO_H_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "propel/mip.hpp"

namespace propel {

// Instance files are JSON with fixed key ordering so generated files are
// byte-reproducible. `ub: null` encodes an infinite upper bound.
nlohmann::ordered_json mip_to_json(const MipInstance& mip);
MipInstance mip_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::ordered_json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace propel

#endif  // PROPEL_IO_H_
