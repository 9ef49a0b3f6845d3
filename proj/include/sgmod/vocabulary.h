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

// Canonical vocabulary and sensitivity taxonomy used by every other module.
//
// A vocabulary has two namespaces. Scene-graph terms (objects, attributes,
// predicates) are unique across those three sections; frame-level tags are
// unique among themselves and may coincide with a scene-graph term (the tag
// "kissing" and the predicate "kissing"). Terms are stored in folded form:
// lowercase with runs of whitespace or hyphens collapsed to '_'.

#ifndef SGMOD_VOCABULARY_H_
#define SGMOD_VOCABULARY_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sgmod {

enum class Category { kImmodesty = 0, kSexual, kViolence, kSubstances, kOther };

inline constexpr std::size_t kNumCategories = 5;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kImmodesty, Category::kSexual, Category::kViolence,
    Category::kSubstances, Category::kOther};

std::string_view CategoryName(Category category);
std::optional<Category> CategoryFromName(std::string_view name);

enum class Section { kObject, kAttribute, kPredicate, kTag };

std::string_view SectionName(Section section);

// Lowercases, trims, and collapses whitespace/hyphen runs to '_'.
// "Nudity Art" -> "nudity_art".
std::string FoldTerm(std::string_view raw);

class Vocabulary {
 public:
  // Parses and validates a vocabulary config (JSON, schema in
  // docs/vocabulary.md). Throws InputError listing every violation.
  // `origin` names the source in diagnostics.
  static Vocabulary FromJson(std::string_view text, std::string_view origin);

  // The compiled-in default config (data/vocabulary.json).
  static const Vocabulary& Default();

  // Folds `term` and applies the synonym map. Unknown terms come back folded
  // but otherwise unchanged, so the result is always a fixed point.
  std::string Canonicalize(std::string_view term) const;

  bool IsObject(std::string_view term) const;
  bool IsAttribute(std::string_view term) const;
  bool IsPredicate(std::string_view term) const;
  bool IsTag(std::string_view term) const;
  bool Contains(Section section, std::string_view term) const;

  bool IsSymmetric(std::string_view predicate) const {
    return symmetric_predicates_.contains(std::string(predicate));
  }
  bool IsInherentlySensitive(std::string_view object) const {
    return inherently_sensitive_.contains(std::string(object));
  }

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::vector<std::string>& predicates() const { return predicates_; }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<std::string>& terms(Section section) const;

  const std::vector<std::string>& TagsIn(Category category) const {
    return tags_by_category_[static_cast<std::size_t>(category)];
  }
  // Precondition: IsTag(tag).
  Category TagCategory(std::string_view tag) const;

  // Categories of an object, attribute, or predicate (the category map).
  // Empty for unknown terms.
  const std::vector<Category>& CategoriesOf(Section section,
                                            std::string_view term) const;
  // Classes of `section` mapped to `category`, in config order. For
  // Section::kTag this is TagsIn(category).
  const std::vector<std::string>& ClassesIn(Section section,
                                            Category category) const;

  // Group ("weapons", "expression", "sexual", ...) of a scene-graph term;
  // empty when unknown.
  std::string_view GroupOf(std::string_view term) const;

  const std::map<std::string, std::string>& synonyms() const {
    return synonyms_;
  }
  const std::set<std::string>& symmetric_predicates() const {
    return symmetric_predicates_;
  }
  const std::set<std::string>& inherently_sensitive_objects() const {
    return inherently_sensitive_;
  }
  const std::vector<std::string>& sensitive_tokens() const {
    return sensitive_tokens_;
  }

 private:
  struct TermInfo {
    Section section;
    std::string group;
    std::vector<Category> categories;
  };

  static std::size_t SectionIndex(Section section) {
    return static_cast<std::size_t>(section);
  }

  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<std::string> predicates_;
  std::vector<std::string> tags_;
  std::array<std::vector<std::string>, kNumCategories> tags_by_category_;
  std::map<std::string, Category, std::less<>> tag_category_;
  std::map<std::string, TermInfo, std::less<>> graph_terms_;
  // [section][category] -> classes, for the three graph sections and tags.
  std::array<std::array<std::vector<std::string>, kNumCategories>, 4>
      classes_by_category_;
  std::map<std::string, std::string> synonyms_;
  std::set<std::string> symmetric_predicates_;
  std::set<std::string> inherently_sensitive_;
  std::vector<std::string> sensitive_tokens_;
};

// Reads and validates a vocabulary config file.
Vocabulary LoadVocabulary(const std::filesystem::path& path);

// Canonical term, or nullopt when the term is in no vocabulary section.
std::optional<std::string> NormalizeTerm(std::string_view term,
                                         const Vocabulary& vocab);

std::string_view DefaultVocabularyJson();

}  // namespace sgmod

#endif  // SGMOD_VOCABULARY_H_
