// Copyright 2026 The edbandit Authors.
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

#ifndef EDBANDIT_INSTANCE_IO_H_
#define EDBANDIT_INSTANCE_IO_H_

#include <filesystem>

#include "edbandit/instance.h"
#include "json.hpp"

namespace edbandit {

// Instance documents have the keys `dims`, `params`, `policies`
// (experts x contexts x actions nested arrays) and `episodes`
// (a list of {context_dist, reward_means}, reward_means nested
// contexts x actions). Doubles are written with round-trip precision.
nlohmann::json instance_to_json(const Instance& instance);

// Parses and shape-checks a document. Does not check the assumptions; call
// validate_instance for that.
Instance instance_from_json(const nlohmann::json& doc);

void save_instance(const Instance& instance, const std::filesystem::path& path);

// Reads, parses and validates (shapes and assumptions).
Instance load_instance(const std::filesystem::path& path);

}  // namespace edbandit

#endif  // EDBANDIT_INSTANCE_IO_H_
