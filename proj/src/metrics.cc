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

#include "sgmod/metrics.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumComponents> kComponentNames = {
    "tag", "object", "attribute", "predicate"};

std::size_t Index(Component c) { return static_cast<std::size_t>(c); }

double Mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view ComponentName(Component component) {
  return kComponentNames[Index(component)];
}

std::optional<Component> ComponentFromName(std::string_view name) {
  for (Component c : kAllComponents) {
    if (ComponentName(c) == name) return c;
  }
  return std::nullopt;
}

Section ComponentSection(Component component) {
  switch (component) {
    case Component::kTag:
      return Section::kTag;
    case Component::kObject:
      return Section::kObject;
    case Component::kAttribute:
      return Section::kAttribute;
    case Component::kPredicate:
      return Section::kPredicate;
  }
  return Section::kTag;
}

std::string_view AveragingModeName(AveragingMode mode) {
  return mode == AveragingMode::kCorpus ? "corpus" : "per-frame";
}

std::optional<AveragingMode> AveragingModeFromName(std::string_view name) {
  if (name == "corpus") return AveragingMode::kCorpus;
  if (name == "per-frame" || name == "per_frame") return AveragingMode::kPerFrame;
  return std::nullopt;
}

void ComponentCounts::Merge(const ComponentCounts& other) {
  for (std::size_t i = 0; i < kNumComponents; ++i) {
    by_component[i].Merge(other.by_component[i]);
  }
}

void ComponentCounts::MergeFrame(const ComponentCounts& frame) {
  for (std::size_t i = 0; i < kNumComponents; ++i) {
    by_component[i].MergeFrame(frame.by_component[i]);
  }
}

void SafetyCounts::Add(bool gt_unsafe, bool pred_unsafe) {
  if (gt_unsafe && pred_unsafe) {
    ++tp;
  } else if (!gt_unsafe && pred_unsafe) {
    ++fp;
  } else if (gt_unsafe && !pred_unsafe) {
    ++fn;
  } else {
    ++tn;
  }
}

void SafetyCounts::Merge(const SafetyCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
}

double HarmonicF1(double recall, double precision) {
  if (recall + precision == 0.0) return 0.0;
  return 2.0 * recall * precision / (recall + precision);
}

std::optional<double> ClassRecall(const ClassTally& t, AveragingMode mode) {
  if (mode == AveragingMode::kPerFrame) {
    if (t.recall_frames == 0) return std::nullopt;
    return t.recall_sum / static_cast<double>(t.recall_frames);
  }
  if (t.tp + t.fn == 0) return std::nullopt;
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
}

std::optional<double> ClassPrecision(const ClassTally& t, AveragingMode mode) {
  if (mode == AveragingMode::kPerFrame) {
    if (t.precision_frames == 0) return std::nullopt;
    return t.precision_sum / static_cast<double>(t.precision_frames);
  }
  if (t.tp + t.fp == 0) return std::nullopt;
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
}

std::map<std::string, double> PerClassRecall(const ClassCounts& counts,
                                             AveragingMode mode) {
  std::map<std::string, double> out;
  for (const auto& [cls, tally] : counts.tallies()) {
    if (auto r = ClassRecall(tally, mode)) out.emplace(cls, *r);
  }
  return out;
}

std::map<std::string, double> PerClassPrecision(const ClassCounts& counts,
                                                AveragingMode mode) {
  std::map<std::string, double> out;
  for (const auto& [cls, tally] : counts.tallies()) {
    if (auto p = ClassPrecision(tally, mode)) out.emplace(cls, *p);
  }
  return out;
}

bool CategoryScore::flagged() const {
  for (std::size_t i = 0; i < kNumComponents; ++i) {
    if (recall_empty[i] || precision_empty[i]) return true;
  }
  return false;
}

std::array<CategoryScore, kNumCategories> CategoryComponentScores(
    const ComponentCounts& counts, const Vocabulary& vocab,
    AveragingMode mode) {
  std::array<CategoryScore, kNumCategories> scores{};
  for (Category category : kAllCategories) {
    CategoryScore& score = scores[static_cast<std::size_t>(category)];
    score.category = category;
    for (Component component : kAllComponents) {
      const std::size_t k = Index(component);
      std::vector<double> recalls, precisions;
      for (const auto& cls :
           vocab.ClassesIn(ComponentSection(component), category)) {
        const ClassTally tally = counts[component].Get(cls);
        if (auto r = ClassRecall(tally, mode)) recalls.push_back(*r);
        if (auto p = ClassPrecision(tally, mode)) precisions.push_back(*p);
      }
      score.recall_empty[k] = recalls.empty();
      score.precision_empty[k] = precisions.empty();
      score.recall[k] = recalls.empty() ? 0.0 : Mean(recalls);
      score.precision[k] = precisions.empty() ? 0.0 : Mean(precisions);
    }
    score.r_sb = (score.recall[0] + score.recall[1] + score.recall[2] +
                  score.recall[3]) /
                 4.0;
    score.p_sb = (score.precision[0] + score.precision[1] +
                  score.precision[2] + score.precision[3]) /
                 4.0;
    score.f1_sb = HarmonicF1(score.r_sb, score.p_sb);
  }
  return scores;
}

CompositeScores AggregateCategories(std::span<const CategoryScore> per_category) {
  if (per_category.size() != kNumCategories) {
    throw InvariantError("composite score needs exactly 5 categories, got " +
                         std::to_string(per_category.size()));
  }
  CompositeScores out;
  for (const auto& score : per_category) {
    out.r_sb += score.r_sb;
    out.p_sb += score.p_sb;
    out.f1_sb += score.f1_sb;
  }
  const double n = static_cast<double>(kNumCategories);
  out.r_sb /= n;
  out.p_sb /= n;
  out.f1_sb /= n;
  return out;
}

double TagMacroF1(const ClassCounts& tag_counts,
                  const std::set<std::string>& supported,
                  const Vocabulary& vocab) {
  if (supported.empty()) throw InputError("supported tag set is empty");
  for (const auto& tag : supported) {
    if (!vocab.IsTag(tag)) {
      throw InputError("supported tag '" + tag + "' is outside the taxonomy");
    }
  }
  std::vector<double> category_means;
  for (Category category : kAllCategories) {
    std::vector<double> f1s;
    for (const auto& tag : vocab.TagsIn(category)) {
      if (!supported.contains(tag)) continue;
      const ClassTally t = tag_counts.Get(tag);
      if (t.tp + t.fp + t.fn == 0) continue;
      f1s.push_back(2.0 * static_cast<double>(t.tp) /
                    static_cast<double>(2 * t.tp + t.fp + t.fn));
    }
    if (!f1s.empty()) category_means.push_back(Mean(f1s));
  }
  return category_means.empty() ? 0.0 : Mean(category_means);
}

double SafetyF1(const SafetyCounts& counts) {
  const std::int64_t denom = 2 * counts.tp + counts.fp + counts.fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(counts.tp) / static_cast<double>(denom);
}

double BinarySafetyF1(
    std::span<const std::pair<std::set<std::string>, std::set<std::string>>>
        frames) {
  SafetyCounts counts;
  for (const auto& [gt, pred] : frames) counts.Add(!gt.empty(), !pred.empty());
  return SafetyF1(counts);
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("embedding dimension mismatch: " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InputError("zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingSidecar ParseEmbeddings(std::string_view json_text,
                                 std::string_view origin) {
  const std::string where(origin);
  json root = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (!root.is_object()) {
    throw InputError(where + ": embeddings sidecar must be a JSON object");
  }
  EmbeddingSidecar sidecar;
  if (!root.contains("model") || !root["model"].is_string()) {
    throw InputError(where + ": embeddings sidecar needs a 'model' string");
  }
  sidecar.model = root["model"].get<std::string>();
  if (!root.contains("dimension") || !root["dimension"].is_number_unsigned() ||
      root["dimension"].get<std::size_t>() == 0) {
    throw InputError(where + ": embeddings sidecar needs a positive 'dimension'");
  }
  sidecar.dimension = root["dimension"].get<std::size_t>();
  if (!root.contains("frames") || !root["frames"].is_object()) {
    throw InputError(where + ": embeddings sidecar needs a 'frames' object");
  }
  auto read_vector = [&](const json& node, const std::string& id,
                         const char* side) {
    std::vector<double> v;
    if (node.is_null()) return v;
    if (!node.is_array()) {
      throw InputError(where + ": frame '" + id + "' " + side +
                       " embedding must be a list of numbers");
    }
    for (const auto& x : node) {
      if (!x.is_number()) {
        throw InputError(where + ": frame '" + id + "' " + side +
                         " embedding must be a list of numbers");
      }
      v.push_back(x.get<double>());
    }
    if (v.size() != sidecar.dimension) {
      throw InputError(where + ": frame '" + id + "' " + side +
                       " embedding has dimension " + std::to_string(v.size()) +
                       ", header says " + std::to_string(sidecar.dimension));
    }
    return v;
  };
  for (const auto& [id, entry] : root["frames"].items()) {
    if (!entry.is_object()) {
      throw InputError(where + ": frame '" + id + "' must be an object");
    }
    EmbeddingPair pair;
    if (entry.contains("gt")) pair.gt = read_vector(entry["gt"], id, "gt");
    if (entry.contains("pred")) pair.pred = read_vector(entry["pred"], id, "pred");
    sidecar.frames.emplace(id, std::move(pair));
  }
  return sidecar;
}

EmbeddingSidecar LoadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embeddings file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseEmbeddings(buffer.str(), path.string());
}

CaptionStats CaptionSimilarity(std::span<const std::string> frame_ids,
                               const EmbeddingSidecar& sidecar) {
  CaptionStats stats;
  for (const auto& id : frame_ids) {
    auto it = sidecar.frames.find(id);
    if (it == sidecar.frames.end() || it->second.gt.empty() ||
        it->second.pred.empty()) {
      ++stats.missing;
      continue;
    }
    stats.similarity_sum += CosineSimilarity(it->second.gt, it->second.pred);
    ++stats.frames;
  }
  return stats;
}

bool EvaluationReport::flagged() const {
  for (const auto& score : per_category) {
    if (score.flagged()) return true;
  }
  return false;
}

EvaluationReport BuildReport(const EvaluationTotals& totals,
                             const Vocabulary& vocab,
                             const ReportOptions& options) {
  EvaluationReport report;
  report.name = options.name;
  report.averaging = options.averaging;
  report.iou_threshold = options.iou_threshold;
  report.per_category =
      CategoryComponentScores(totals.components, vocab, options.averaging);
  const CompositeScores composite = AggregateCategories(report.per_category);
  report.r_sb = composite.r_sb;
  report.p_sb = composite.p_sb;
  report.f1_sb = composite.f1_sb;

  std::set<std::string> supported = options.supported_tags;
  if (supported.empty()) supported.insert(vocab.tags().begin(), vocab.tags().end());
  report.tag_f1_macro =
      TagMacroF1(totals.components[Component::kTag], supported, vocab);
  for (const auto& tag : vocab.tags()) {
    if (supported.contains(tag)) report.supported_tags.push_back(tag);
  }
  report.taxonomy_size = vocab.tags().size();

  report.safety = totals.safety;
  report.safety_f1 = SafetyF1(totals.safety);
  report.caption_similarity_mean = totals.caption.mean();
  report.caption_frames = totals.caption.frames;
  report.caption_missing = totals.caption.missing;
  report.embedding_model = options.embedding_model;

  double object_macro = 0.0;
  for (const auto& score : report.per_category) {
    object_macro += score.r(Component::kObject);
  }
  report.object_recall_category_macro =
      object_macro / static_cast<double>(kNumCategories);
  std::int64_t object_tp = 0, object_fn = 0;
  for (const auto& cls : vocab.objects()) {
    const ClassTally t = totals.components[Component::kObject].Get(cls);
    object_tp += t.tp;
    object_fn += t.fn;
  }
  if (object_tp + object_fn > 0) {
    report.object_recall_global = static_cast<double>(object_tp) /
                                  static_cast<double>(object_tp + object_fn);
  }

  report.frame_count = totals.frame_count;
  report.sensitive_count = totals.sensitive_count;
  report.general_count = totals.general_count;
  report.missing_predictions = totals.missing_predictions;
  report.extra_predictions = totals.extra_predictions;
  report.parse_failures = totals.parse_failures;

  for (Component component : kAllComponents) {
    for (const auto& cls : vocab.terms(ComponentSection(component))) {
      const ClassTally t = totals.components[component].Get(cls);
      ClassRow row;
      row.component = component;
      row.class_name = cls;
      row.tp = t.tp;
      row.fp = t.fp;
      row.fn = t.fn;
      row.recall = ClassRecall(t, options.averaging);
      row.precision = ClassPrecision(t, options.averaging);
      if (row.recall || row.precision) {
        row.f1 = HarmonicF1(row.recall.value_or(0.0), row.precision.value_or(0.0));
      }
      report.per_class_table.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace sgmod
