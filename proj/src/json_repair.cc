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

#include "sgmod/json_repair.h"

#include <cctype>

namespace sgmod {
namespace {

nlohmann::json TryParse(std::string_view text) {
  return nlohmann::json::parse(text.begin(), text.end(), nullptr,
                               /*allow_exceptions=*/false);
}

}  // namespace

std::string StripCodeFences(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 3, "```") == 0) {
      i += 3;
      // Language identifier directly after the opening fence.
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_' || text[i] == '-')) {
        ++i;
      }
      out.push_back(' ');
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string RepairQuotesAndCommas(std::string_view text) {
  enum class State { kOutside, kDouble, kSingle };
  State state = State::kOutside;
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    switch (state) {
      case State::kOutside:
        if (c == '"') {
          state = State::kDouble;
          out.push_back(c);
        } else if (c == '\'') {
          state = State::kSingle;
          out.push_back('"');
        } else if (c == ',') {
          std::size_t j = i + 1;
          while (j < text.size() &&
                 std::isspace(static_cast<unsigned char>(text[j]))) {
            ++j;
          }
          if (j < text.size() && (text[j] == '}' || text[j] == ']')) break;
          out.push_back(c);
        } else {
          out.push_back(c);
        }
        break;
      case State::kDouble:
        out.push_back(c);
        if (c == '\\' && i + 1 < text.size()) {
          out.push_back(text[++i]);
        } else if (c == '"') {
          state = State::kOutside;
        }
        break;
      case State::kSingle:
        if (c == '\\' && i + 1 < text.size()) {
          const char next = text[++i];
          if (next == '\'') {
            out.push_back('\'');
          } else {
            out.push_back('\\');
            out.push_back(next);
          }
        } else if (c == '"') {
          out += "\\\"";
        } else if (c == '\'') {
          out.push_back('"');
          state = State::kOutside;
        } else {
          out.push_back(c);
        }
        break;
    }
  }
  return out;
}

std::optional<RepairedJson> RepairJsonObject(std::string_view payload) {
  RepairedJson result;
  std::string text(payload);
  if (text.find("```") != std::string::npos) {
    text = StripCodeFences(text);
    result.repairs.push_back("code fences stripped");
  }
  const auto first = text.find('{');
  const auto last = text.rfind('}');
  if (first == std::string::npos || last == std::string::npos ||
      last < first) {
    return std::nullopt;
  }
  const bool has_prose = text.find_first_not_of(" \t\r\n") != first ||
                         text.find_last_not_of(" \t\r\n") != last;
  text = text.substr(first, last - first + 1);
  if (has_prose) result.repairs.push_back("surrounding prose trimmed");

  result.value = TryParse(text);
  if (result.value.is_object()) return result;

  result.value = TryParse(RepairQuotesAndCommas(text));
  if (result.value.is_object()) {
    result.repairs.push_back("quotes and trailing commas repaired");
    return result;
  }
  return std::nullopt;
}

}  // namespace sgmod
