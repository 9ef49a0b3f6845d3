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

// Serialization and table rendering for evaluation reports.

#ifndef SGMOD_REPORT_IO_H_
#define SGMOD_REPORT_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmod/metrics.h"

namespace sgmod {

nlohmann::json ReportToJson(const EvaluationReport& report);
// Throws InputError on a missing or mistyped field.
EvaluationReport ReportFromJson(const nlohmann::json& root);

// Pretty-printed JSON with sorted keys and a trailing newline.
std::string SerializeReport(const EvaluationReport& report);
EvaluationReport LoadReport(const std::filesystem::path& path);

// Sorted by f1_sb descending; ties keep input order.
std::vector<EvaluationReport> Leaderboard(std::vector<EvaluationReport> reports);

// Headline table (Model | F1^tag | R^obj | R_SB | F1_SB | cap), tag coverage
// table (Model | Tags | F1^tag | F1^s), and a per-category breakdown for each
// report. Rows appear in the given order.
std::string RenderMarkdown(std::span<const EvaluationReport> reports);

// One row per report with the headline and coverage columns.
std::string RenderCsv(std::span<const EvaluationReport> reports);

}  // namespace sgmod

#endif  // SGMOD_REPORT_IO_H_
