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

#ifndef EDBANDIT_ERRORS_H_
#define EDBANDIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace edbandit {

// Malformed or inconsistent user input (files, config, arguments).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An instance or parameter set violates one of the modelling assumptions
// (context floor p_X, action floor p_V, reward floor gamma).
class AssumptionViolation : public std::runtime_error {
 public:
  explicit AssumptionViolation(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace edbandit

#endif  // EDBANDIT_ERRORS_H_
