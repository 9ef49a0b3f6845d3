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

// Category-macro composite scoring over scene-graph components.
//
// For each sensitivity category c and component k in {tag, object,
// attribute, predicate}, the component recall R^k_c is the macro mean of
// per-class recall over classes mapped to c. The category recall is
// (R^tag_c + R^obj_c + R^att_c + R^pred_c) / 4 and r_sb is the unweighted
// mean over the five categories; precision is analogous. f1_sb averages the
// per-category harmonic means, so each category weighs the same no matter
// how many frames it has.

#ifndef SGMOD_METRICS_H_
#define SGMOD_METRICS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgmod/matching.h"
#include "sgmod/vocabulary.h"

namespace sgmod {

enum class Component { kTag = 0, kObject, kAttribute, kPredicate };

inline constexpr std::size_t kNumComponents = 4;
inline constexpr std::array<Component, kNumComponents> kAllComponents = {
    Component::kTag, Component::kObject, Component::kAttribute,
    Component::kPredicate};

std::string_view ComponentName(Component component);
std::optional<Component> ComponentFromName(std::string_view name);
Section ComponentSection(Component component);

enum class AveragingMode { kCorpus, kPerFrame };

std::string_view AveragingModeName(AveragingMode mode);
std::optional<AveragingMode> AveragingModeFromName(std::string_view name);

struct ComponentCounts {
  std::array<ClassCounts, kNumComponents> by_component;

  ClassCounts& operator[](Component c) {
    return by_component[static_cast<std::size_t>(c)];
  }
  const ClassCounts& operator[](Component c) const {
    return by_component[static_cast<std::size_t>(c)];
  }
  void Merge(const ComponentCounts& other);
  void MergeFrame(const ComponentCounts& frame);

  bool operator==(const ComponentCounts&) const = default;
};

// Confusion counts of the frame-level unsafe decision.
struct SafetyCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  void Add(bool gt_unsafe, bool pred_unsafe);
  void Merge(const SafetyCounts& other);

  bool operator==(const SafetyCounts&) const = default;
};

// 2rp/(r+p), defined as 0 when r + p = 0.
double HarmonicF1(double recall, double precision);

// tp/(tp+fn) in corpus mode, mean per-frame recall in per-frame mode;
// nullopt when the class never occurs in ground truth.
std::optional<double> ClassRecall(const ClassTally& tally, AveragingMode mode);
// tp/(tp+fp) analogue; nullopt when the class is never predicted.
std::optional<double> ClassPrecision(const ClassTally& tally, AveragingMode mode);

// Defined per-class recalls; classes with tp+fn = 0 are absent.
std::map<std::string, double> PerClassRecall(
    const ClassCounts& counts, AveragingMode mode = AveragingMode::kCorpus);
std::map<std::string, double> PerClassPrecision(
    const ClassCounts& counts, AveragingMode mode = AveragingMode::kCorpus);

struct CategoryScore {
  Category category = Category::kImmodesty;
  // Indexed by Component.
  std::array<double, kNumComponents> recall{};
  std::array<double, kNumComponents> precision{};
  // True when no class of that component had a defined value in this
  // category; the component then contributes 0.
  std::array<bool, kNumComponents> recall_empty{};
  std::array<bool, kNumComponents> precision_empty{};
  double r_sb = 0.0;
  double p_sb = 0.0;
  double f1_sb = 0.0;

  double r(Component c) const { return recall[static_cast<std::size_t>(c)]; }
  double p(Component c) const { return precision[static_cast<std::size_t>(c)]; }
  bool flagged() const;
};

std::array<CategoryScore, kNumCategories> CategoryComponentScores(
    const ComponentCounts& counts, const Vocabulary& vocab,
    AveragingMode mode = AveragingMode::kCorpus);

struct CompositeScores {
  double r_sb = 0.0;
  double p_sb = 0.0;
  double f1_sb = 0.0;
};

// Unweighted means over the categories. Throws InvariantError unless
// exactly kNumCategories scores are given.
CompositeScores AggregateCategories(std::span<const CategoryScore> per_category);

// Per-tag F1 over `supported` tags (tags with tp = fp = fn = 0 are skipped),
// averaged within each category, then over categories that have at least one
// scored tag. Throws InputError when `supported` is empty.
double TagMacroF1(const ClassCounts& tag_counts,
                  const std::set<std::string>& supported,
                  const Vocabulary& vocab);

double SafetyF1(const SafetyCounts& counts);

// A frame is predicted unsafe iff its predicted tag set is non-empty.
double BinarySafetyF1(
    std::span<const std::pair<std::set<std::string>, std::set<std::string>>>
        frames);

// Throws InputError on length mismatch or a zero-norm vector.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct EmbeddingPair {
  std::vector<double> gt;
  std::vector<double> pred;
};

// Precomputed caption embeddings (schema in docs/formats.md).
struct EmbeddingSidecar {
  std::string model;
  std::size_t dimension = 0;
  std::map<std::string, EmbeddingPair> frames;
};

EmbeddingSidecar ParseEmbeddings(std::string_view json_text,
                                 std::string_view origin);
EmbeddingSidecar LoadEmbeddings(const std::filesystem::path& path);

struct CaptionStats {
  double similarity_sum = 0.0;
  std::int64_t frames = 0;
  std::int64_t missing = 0;

  std::optional<double> mean() const {
    if (frames == 0) return std::nullopt;
    return similarity_sum / static_cast<double>(frames);
  }
};

// Mean cosine over the given frame ids; ids without an embedding pair are
// counted in `missing`.
CaptionStats CaptionSimilarity(std::span<const std::string> frame_ids,
                               const EmbeddingSidecar& sidecar);

// Everything a completed evaluation pass produces.
struct EvaluationTotals {
  ComponentCounts components;
  SafetyCounts safety;
  CaptionStats caption;
  std::int64_t frame_count = 0;
  std::int64_t sensitive_count = 0;
  std::int64_t general_count = 0;
  std::int64_t missing_predictions = 0;
  std::int64_t extra_predictions = 0;
  std::int64_t parse_failures = 0;
};

struct ClassRow {
  Component component = Component::kTag;
  std::string class_name;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
};

struct ReportOptions {
  std::string name = "model";
  AveragingMode averaging = AveragingMode::kCorpus;
  double iou_threshold = kDefaultIouThreshold;
  // Empty means every tag in the taxonomy.
  std::set<std::string> supported_tags;
  std::string embedding_model;
};

struct EvaluationReport {
  std::string name;
  AveragingMode averaging = AveragingMode::kCorpus;
  double iou_threshold = kDefaultIouThreshold;
  std::array<CategoryScore, kNumCategories> per_category{};
  double r_sb = 0.0;
  double p_sb = 0.0;
  double f1_sb = 0.0;
  double tag_f1_macro = 0.0;
  std::vector<std::string> supported_tags;
  std::size_t taxonomy_size = 0;
  double safety_f1 = 0.0;
  SafetyCounts safety;
  std::optional<double> caption_similarity_mean;
  std::int64_t caption_frames = 0;
  std::int64_t caption_missing = 0;
  std::string embedding_model;
  // Mean of the per-category object recalls, and pooled tp/(tp+fn) over all
  // object classes.
  double object_recall_category_macro = 0.0;
  std::optional<double> object_recall_global;
  std::int64_t frame_count = 0;
  std::int64_t sensitive_count = 0;
  std::int64_t general_count = 0;
  std::int64_t missing_predictions = 0;
  std::int64_t extra_predictions = 0;
  std::int64_t parse_failures = 0;
  std::vector<ClassRow> per_class_table;

  bool flagged() const;
};

EvaluationReport BuildReport(const EvaluationTotals& totals,
                             const Vocabulary& vocab,
                             const ReportOptions& options);

}  // namespace sgmod

#endif  // SGMOD_METRICS_H_
