/* Copyright 2026 The sgmod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Best-effort recovery of a JSON object from free-form model output.
//
// The repair set is fixed: strip markdown code fences, drop prose before the
// first '{' and after the last '}', accept single-quoted strings, and drop
// trailing commas. Numeric-string coercion happens at field extraction time
// in the prediction parser, not here.

#ifndef SGMOD_JSON_REPAIR_H_
#define SGMOD_JSON_REPAIR_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sgmod {

struct RepairedJson {
  nlohmann::json value;
  // Names of the repairs that were needed, in application order.
  std::vector<std::string> repairs;
};

std::string StripCodeFences(std::string_view text);

// Rewrites single-quoted strings as double-quoted and removes commas that
// directly precede '}' or ']'. Text inside double-quoted strings is copied
// verbatim.
std::string RepairQuotesAndCommas(std::string_view text);

// nullopt when no JSON object can be recovered.
std::optional<RepairedJson> RepairJsonObject(std::string_view payload);

}  // namespace sgmod

#endif  // SGMOD_JSON_REPAIR_H_
