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

#include "sgmod/report_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

using nlohmann::json;

constexpr const char* kFlagMarker = "*";

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string Fixed(const std::optional<double>& v) {
  return v ? Fixed(*v) : std::string("n/a");
}

// Accessors that turn schema violations into InputError.
const json& Field(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) {
    throw InputError("report: missing field '" + where + key + "'");
  }
  return node.at(key);
}

double Number(const json& node, const char* key, const std::string& where = "") {
  const json& v = Field(node, key, where);
  if (!v.is_number()) {
    throw InputError("report: field '" + where + key + "' must be a number");
  }
  return v.get<double>();
}

std::optional<double> MaybeNumber(const json& node, const char* key,
                                  const std::string& where = "") {
  const json& v = Field(node, key, where);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw InputError("report: field '" + where + key + "' must be a number or null");
  }
  return v.get<double>();
}

std::int64_t Integer(const json& node, const char* key,
                     const std::string& where = "") {
  const json& v = Field(node, key, where);
  if (!v.is_number_integer()) {
    throw InputError("report: field '" + where + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string String(const json& node, const char* key,
                   const std::string& where = "") {
  const json& v = Field(node, key, where);
  if (!v.is_string()) {
    throw InputError("report: field '" + where + key + "' must be a string");
  }
  return v.get<std::string>();
}

Component RequireComponent(const std::string& name) {
  auto c = ComponentFromName(name);
  if (!c) throw InputError("report: unknown component '" + name + "'");
  return *c;
}

json CategoryJson(const CategoryScore& score) {
  json recall = json::object(), precision = json::object();
  json recall_empty = json::array(), precision_empty = json::array();
  for (Component c : kAllComponents) {
    const std::string name(ComponentName(c));
    const std::size_t k = static_cast<std::size_t>(c);
    recall[name] = score.recall[k];
    precision[name] = score.precision[k];
    if (score.recall_empty[k]) recall_empty.push_back(name);
    if (score.precision_empty[k]) precision_empty.push_back(name);
  }
  return {{"category", CategoryName(score.category)},
          {"recall", std::move(recall)},
          {"precision", std::move(precision)},
          {"recall_empty", std::move(recall_empty)},
          {"precision_empty", std::move(precision_empty)},
          {"r_sb", score.r_sb},
          {"p_sb", score.p_sb},
          {"f1_sb", score.f1_sb}};
}

CategoryScore CategoryFromJson(const json& node) {
  CategoryScore score;
  const std::string name = String(node, "category", "per_category.");
  auto category = CategoryFromName(name);
  if (!category) throw InputError("report: unknown category '" + name + "'");
  score.category = *category;
  const json& recall = Field(node, "recall", "per_category.");
  const json& precision = Field(node, "precision", "per_category.");
  for (Component c : kAllComponents) {
    const std::string cname(ComponentName(c));
    const std::size_t k = static_cast<std::size_t>(c);
    score.recall[k] = Number(recall, cname.c_str(), "per_category.recall.");
    score.precision[k] = Number(precision, cname.c_str(), "per_category.precision.");
  }
  for (const auto& e : Field(node, "recall_empty", "per_category.")) {
    score.recall_empty[static_cast<std::size_t>(RequireComponent(e.get<std::string>()))] = true;
  }
  for (const auto& e : Field(node, "precision_empty", "per_category.")) {
    score.precision_empty[static_cast<std::size_t>(RequireComponent(e.get<std::string>()))] = true;
  }
  score.r_sb = Number(node, "r_sb", "per_category.");
  score.p_sb = Number(node, "p_sb", "per_category.");
  score.f1_sb = Number(node, "f1_sb", "per_category.");
  return score;
}

std::string ModelCell(const EvaluationReport& report) {
  return report.flagged() ? report.name + kFlagMarker : report.name;
}

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json ReportToJson(const EvaluationReport& report) {
  json per_category = json::array();
  for (const auto& score : report.per_category) {
    per_category.push_back(CategoryJson(score));
  }
  json per_class = json::array();
  for (const auto& row : report.per_class_table) {
    per_class.push_back({{"component", ComponentName(row.component)},
                         {"class", row.class_name},
                         {"tp", row.tp},
                         {"fp", row.fp},
                         {"fn", row.fn},
                         {"recall", OptionalNumber(row.recall)},
                         {"precision", OptionalNumber(row.precision)},
                         {"f1", OptionalNumber(row.f1)}});
  }
  return {
      {"name", report.name},
      {"averaging", AveragingModeName(report.averaging)},
      {"iou_threshold", report.iou_threshold},
      {"log_base", "e"},
      {"scores",
       {{"r_sb", report.r_sb},
        {"p_sb", report.p_sb},
        {"f1_sb", report.f1_sb},
        {"tag_f1_macro", report.tag_f1_macro},
        {"safety_f1", report.safety_f1},
        {"caption_similarity_mean", OptionalNumber(report.caption_similarity_mean)},
        {"object_recall_category_macro", report.object_recall_category_macro},
        {"object_recall_global", OptionalNumber(report.object_recall_global)}}},
      {"flagged", report.flagged()},
      {"per_category", std::move(per_category)},
      {"supported_tags", report.supported_tags},
      {"taxonomy_size", report.taxonomy_size},
      {"safety",
       {{"tp", report.safety.tp},
        {"fp", report.safety.fp},
        {"fn", report.safety.fn},
        {"tn", report.safety.tn}}},
      {"caption",
       {{"frames", report.caption_frames},
        {"missing", report.caption_missing},
        {"embedding_model", report.embedding_model}}},
      {"counts",
       {{"frames", report.frame_count},
        {"sensitive", report.sensitive_count},
        {"general", report.general_count},
        {"missing_predictions", report.missing_predictions},
        {"extra_predictions", report.extra_predictions},
        {"parse_failures", report.parse_failures}}},
      {"per_class", std::move(per_class)},
  };
}

EvaluationReport ReportFromJson(const json& root) {
  if (!root.is_object()) throw InputError("report: top level must be an object");
  EvaluationReport report;
  report.name = String(root, "name");
  const std::string averaging = String(root, "averaging");
  auto mode = AveragingModeFromName(averaging);
  if (!mode) throw InputError("report: unknown averaging mode '" + averaging + "'");
  report.averaging = *mode;
  report.iou_threshold = Number(root, "iou_threshold");

  const json& scores = Field(root, "scores", "");
  report.r_sb = Number(scores, "r_sb", "scores.");
  report.p_sb = Number(scores, "p_sb", "scores.");
  report.f1_sb = Number(scores, "f1_sb", "scores.");
  report.tag_f1_macro = Number(scores, "tag_f1_macro", "scores.");
  report.safety_f1 = Number(scores, "safety_f1", "scores.");
  report.caption_similarity_mean =
      MaybeNumber(scores, "caption_similarity_mean", "scores.");
  report.object_recall_category_macro =
      Number(scores, "object_recall_category_macro", "scores.");
  report.object_recall_global = MaybeNumber(scores, "object_recall_global", "scores.");

  const json& per_category = Field(root, "per_category", "");
  if (!per_category.is_array() || per_category.size() != kNumCategories) {
    throw InputError("report: 'per_category' must list 5 categories");
  }
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    report.per_category[i] = CategoryFromJson(per_category[i]);
  }

  for (const auto& tag : Field(root, "supported_tags", "")) {
    if (!tag.is_string()) throw InputError("report: supported_tags must be strings");
    report.supported_tags.push_back(tag.get<std::string>());
  }
  report.taxonomy_size = static_cast<std::size_t>(Integer(root, "taxonomy_size"));

  const json& safety = Field(root, "safety", "");
  report.safety.tp = Integer(safety, "tp", "safety.");
  report.safety.fp = Integer(safety, "fp", "safety.");
  report.safety.fn = Integer(safety, "fn", "safety.");
  report.safety.tn = Integer(safety, "tn", "safety.");

  const json& caption = Field(root, "caption", "");
  report.caption_frames = Integer(caption, "frames", "caption.");
  report.caption_missing = Integer(caption, "missing", "caption.");
  report.embedding_model = String(caption, "embedding_model", "caption.");

  const json& counts = Field(root, "counts", "");
  report.frame_count = Integer(counts, "frames", "counts.");
  report.sensitive_count = Integer(counts, "sensitive", "counts.");
  report.general_count = Integer(counts, "general", "counts.");
  report.missing_predictions = Integer(counts, "missing_predictions", "counts.");
  report.extra_predictions = Integer(counts, "extra_predictions", "counts.");
  report.parse_failures = Integer(counts, "parse_failures", "counts.");

  for (const auto& node : Field(root, "per_class", "")) {
    ClassRow row;
    row.component = RequireComponent(String(node, "component", "per_class."));
    row.class_name = String(node, "class", "per_class.");
    row.tp = Integer(node, "tp", "per_class.");
    row.fp = Integer(node, "fp", "per_class.");
    row.fn = Integer(node, "fn", "per_class.");
    row.recall = MaybeNumber(node, "recall", "per_class.");
    row.precision = MaybeNumber(node, "precision", "per_class.");
    row.f1 = MaybeNumber(node, "f1", "per_class.");
    report.per_class_table.push_back(std::move(row));
  }
  return report;
}

std::string SerializeReport(const EvaluationReport& report) {
  return ReportToJson(report).dump(2, ' ', false, json::error_handler_t::replace) +
         "\n";
}

EvaluationReport LoadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report: " + path.string());
  json root = json::parse(in, nullptr, false);
  if (root.is_discarded()) {
    throw InputError("report is not valid JSON: " + path.string());
  }
  try {
    return ReportFromJson(root);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<EvaluationReport> Leaderboard(std::vector<EvaluationReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const EvaluationReport& a, const EvaluationReport& b) {
                     return a.f1_sb > b.f1_sb;
                   });
  return reports;
}

std::string RenderMarkdown(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  bool any_flagged = false;
  out << "| Model | F1^tag | R^obj | R_SB | F1_SB | cap |\n"
      << "|---|---:|---:|---:|---:|---:|\n";
  for (const auto& r : reports) {
    any_flagged = any_flagged || r.flagged();
    out << "| " << ModelCell(r) << " | " << Fixed(r.tag_f1_macro) << " | "
        << Fixed(r.object_recall_category_macro) << " | " << Fixed(r.r_sb)
        << " | " << Fixed(r.f1_sb) << " | " << Fixed(r.caption_similarity_mean)
        << " |\n";
  }
  out << "\n| Model | Tags | F1^tag | F1^s |\n"
      << "|---|---:|---:|---:|\n";
  for (const auto& r : reports) {
    out << "| " << ModelCell(r) << " | " << r.supported_tags.size() << "/"
        << r.taxonomy_size << " | " << Fixed(r.tag_f1_macro) << " | "
        << Fixed(r.safety_f1) << " |\n";
  }
  if (any_flagged) {
    out << "\n" << kFlagMarker
        << " At least one component had no defined class in some category and "
           "contributed 0 (marked "
        << kFlagMarker << " below).\n";
  }
  for (const auto& r : reports) {
    out << "\n### " << r.name << " (" << AveragingModeName(r.averaging)
        << " averaging, IoU >= " << Fixed(r.iou_threshold) << ")\n\n"
        << "| Category | R^tag | R^obj | R^att | R^pred | R_SB | P_SB | F1_SB |\n"
        << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& s : r.per_category) {
      out << "| " << CategoryName(s.category);
      for (Component c : kAllComponents) {
        const std::size_t k = static_cast<std::size_t>(c);
        out << " | " << Fixed(s.recall[k])
            << (s.recall_empty[k] || s.precision_empty[k] ? kFlagMarker : "");
      }
      out << " | " << Fixed(s.r_sb) << " | " << Fixed(s.p_sb) << " | "
          << Fixed(s.f1_sb) << " |\n";
    }
    out << "\nframes " << r.frame_count << " (sensitive " << r.sensitive_count
        << ", general " << r.general_count << "); missing predictions "
        << r.missing_predictions << "; extra predictions " << r.extra_predictions
        << "; parse failures " << r.parse_failures << "; global R^obj "
        << Fixed(r.object_recall_global) << "\n";
  }
  return out.str();
}

std::string RenderCsv(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  out << "model,f1_tag,r_obj,r_sb,f1_sb,cap,p_sb,tags_supported,taxonomy_size,"
         "f1_safety,r_obj_global,flagged\n";
  for (const auto& r : reports) {
    out << CsvEscape(r.name) << "," << Fixed(r.tag_f1_macro) << ","
        << Fixed(r.object_recall_category_macro) << "," << Fixed(r.r_sb) << ","
        << Fixed(r.f1_sb) << "," << Fixed(r.caption_similarity_mean) << ","
        << Fixed(r.p_sb) << "," << r.supported_tags.size() << ","
        << r.taxonomy_size << "," << Fixed(r.safety_f1) << ","
        << Fixed(r.object_recall_global) << "," << (r.flagged() ? 1 : 0)
        << "\n";
  }
  return out.str();
}

}  // namespace sgmod
