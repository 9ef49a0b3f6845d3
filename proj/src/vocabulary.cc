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

#include "sgmod/vocabulary.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

// Insertion order is kept so term lists follow the config file.
using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "immodesty", "sexual", "violence", "substances", "other"};
constexpr std::array<std::size_t, kNumCategories> kTagsPerCategory = {4, 4, 2,
                                                                       2, 4};
constexpr std::size_t kTaxonomySize = 16;

const std::vector<std::string> kEmptyTerms;
const std::vector<Category> kNoCategories;

// Collects every problem before failing so a broken config can be fixed in
// one pass.
class Diagnostics {
 public:
  void Add(std::string message) { messages_.push_back(std::move(message)); }

  void ThrowIfAny(std::string_view origin) const {
    if (messages_.empty()) return;
    std::ostringstream out;
    out << "invalid vocabulary " << origin << ":";
    for (const auto& m : messages_) out << "\n  - " << m;
    throw InputError(out.str());
  }

 private:
  std::vector<std::string> messages_;
};

std::vector<std::string> StringList(const json& node, const std::string& where,
                                    Diagnostics& diag) {
  std::vector<std::string> out;
  if (!node.is_array()) {
    diag.Add(where + " must be a list of strings");
    return out;
  }
  for (const auto& item : node) {
    if (!item.is_string()) {
      diag.Add(where + " contains a non-string entry");
      continue;
    }
    out.push_back(FoldTerm(item.get<std::string>()));
  }
  return out;
}

std::vector<Category> CategoryList(const json& node, const std::string& where,
                                   Diagnostics& diag) {
  std::vector<Category> out;
  for (const auto& name : StringList(node, where, diag)) {
    auto category = CategoryFromName(name);
    if (!category) {
      diag.Add(where + ": unknown category '" + name + "'");
      continue;
    }
    if (std::find(out.begin(), out.end(), *category) == out.end()) {
      out.push_back(*category);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view CategoryName(Category category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> CategoryFromName(std::string_view name) {
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view SectionName(Section section) {
  switch (section) {
    case Section::kObject:
      return "object";
    case Section::kAttribute:
      return "attribute";
    case Section::kPredicate:
      return "predicate";
    case Section::kTag:
      return "tag";
  }
  return "unknown";
}

std::string FoldTerm(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_separator = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '-' || c == '_') {
      pending_separator = !out.empty();
      continue;
    }
    if (pending_separator) {
      out.push_back('_');
      pending_separator = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

Vocabulary Vocabulary::FromJson(std::string_view text,
                                std::string_view origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("invalid vocabulary " + std::string(origin) +
                     ": malformed JSON: " + e.what());
  }
  Diagnostics diag;
  if (!root.is_object()) {
    diag.Add("top level must be an object");
    diag.ThrowIfAny(origin);
  }

  Vocabulary vocab;

  // Categories are fixed by the metric; the config must name them verbatim.
  if (root.contains("categories")) {
    auto names = StringList(root["categories"], "categories", diag);
    std::vector<std::string> expected(kCategoryNames.begin(),
                                      kCategoryNames.end());
    if (names != expected) {
      diag.Add(
          "categories must be exactly [immodesty, sexual, violence, "
          "substances, other]");
    }
  }

  // Tags.
  if (!root.contains("tags") || !root["tags"].is_object()) {
    diag.Add("missing 'tags' object (category -> tag list)");
  } else {
    std::size_t total = 0;
    for (const auto& [name, list] : root["tags"].items()) {
      auto category = CategoryFromName(FoldTerm(name));
      auto tags = StringList(list, "tags." + name, diag);
      total += tags.size();
      if (!category) {
        diag.Add("tags: unknown category '" + name + "'");
        continue;
      }
      for (auto& tag : tags) {
        if (vocab.tag_category_.contains(tag)) {
          diag.Add("duplicate canonical term '" + tag + "' in tags");
          continue;
        }
        vocab.tag_category_.emplace(tag, *category);
        vocab.tags_by_category_[static_cast<std::size_t>(*category)].push_back(
            tag);
      }
    }
    if (total != kTaxonomySize) {
      diag.Add("tag taxonomy must contain 16 entries (found " +
               std::to_string(total) + ")");
    }
    for (std::size_t i = 0; i < kNumCategories; ++i) {
      const auto size = vocab.tags_by_category_[i].size();
      if (size != kTagsPerCategory[i]) {
        diag.Add("category '" + std::string(kCategoryNames[i]) + "' must have " +
                 std::to_string(kTagsPerCategory[i]) + " tags (found " +
                 std::to_string(size) + ")");
      }
    }
    for (const auto& list : vocab.tags_by_category_) {
      vocab.tags_.insert(vocab.tags_.end(), list.begin(), list.end());
    }
  }

  // Scene-graph sections: group -> term list, with group -> categories.
  const json empty_object = json::object();
  const json& group_categories = root.contains("group_categories")
                                     ? root["group_categories"]
                                     : empty_object;
  const json& overrides = root.contains("category_overrides")
                              ? root["category_overrides"]
                              : empty_object;
  struct SectionSpec {
    const char* key;
    Section section;
    std::vector<std::string>* terms;
  };
  const SectionSpec sections[] = {
      {"objects", Section::kObject, &vocab.objects_},
      {"attributes", Section::kAttribute, &vocab.attributes_},
      {"predicates", Section::kPredicate, &vocab.predicates_},
  };
  for (const auto& spec : sections) {
    if (!root.contains(spec.key) || !root[spec.key].is_object()) {
      diag.Add(std::string("missing '") + spec.key +
               "' object (group -> term list)");
      continue;
    }
    const json* groups_cats = group_categories.contains(spec.key)
                                  ? &group_categories[spec.key]
                                  : nullptr;
    for (const auto& [group_raw, list] : root[spec.key].items()) {
      const std::string group = FoldTerm(group_raw);
      const std::string where = std::string(spec.key) + "." + group_raw;
      std::vector<Category> group_cats;
      if (groups_cats != nullptr && groups_cats->contains(group_raw)) {
        group_cats = CategoryList((*groups_cats)[group_raw],
                                  "group_categories." + where, diag);
      }
      for (auto& term : StringList(list, where, diag)) {
        if (vocab.graph_terms_.contains(term)) {
          const auto& prior = vocab.graph_terms_.find(term)->second;
          diag.Add("duplicate canonical term '" + term + "' (" +
                   std::string(SectionName(prior.section)) + " and " +
                   std::string(SectionName(spec.section)) + ")");
          continue;
        }
        std::vector<Category> cats = group_cats;
        if (overrides.contains(term)) {
          cats = CategoryList(overrides[term], "category_overrides." + term,
                              diag);
        }
        if (cats.empty()) {
          diag.Add(std::string(SectionName(spec.section)) + " '" + term +
                   "' is mapped to no category");
        }
        spec.terms->push_back(term);
        vocab.graph_terms_.emplace(term, TermInfo{spec.section, group, cats});
      }
    }
  }
  for (const auto& [term, unused] : overrides.items()) {
    if (!vocab.graph_terms_.contains(FoldTerm(term))) {
      diag.Add("category_overrides: unknown term '" + term + "'");
    }
  }

  // Synonyms.
  if (root.contains("synonyms")) {
    if (!root["synonyms"].is_object()) {
      diag.Add("synonyms must be an object (alias -> canonical term)");
    } else {
      for (const auto& [alias_raw, target] : root["synonyms"].items()) {
        const std::string alias = FoldTerm(alias_raw);
        if (!target.is_string()) {
          diag.Add("synonym '" + alias_raw + "' must map to a string");
          continue;
        }
        const std::string canonical = FoldTerm(target.get<std::string>());
        if (vocab.graph_terms_.contains(alias) ||
            vocab.tag_category_.contains(alias)) {
          diag.Add("synonym alias '" + alias + "' is itself a canonical term");
        }
        if (!vocab.graph_terms_.contains(canonical) &&
            !vocab.tag_category_.contains(canonical)) {
          diag.Add("synonym '" + alias + "' maps to unknown term '" +
                   canonical + "'");
        }
        if (!vocab.synonyms_.emplace(alias, canonical).second) {
          diag.Add("duplicate synonym alias '" + alias + "'");
        }
      }
    }
  }

  if (root.contains("symmetric_predicates")) {
    for (auto& p : StringList(root["symmetric_predicates"],
                              "symmetric_predicates", diag)) {
      if (!vocab.IsPredicate(p)) {
        diag.Add("symmetric_predicates: '" + p + "' is not a predicate");
      }
      vocab.symmetric_predicates_.insert(std::move(p));
    }
  }
  if (root.contains("inherently_sensitive_objects")) {
    for (auto& o : StringList(root["inherently_sensitive_objects"],
                              "inherently_sensitive_objects", diag)) {
      if (!vocab.IsObject(o)) {
        diag.Add("inherently_sensitive_objects: '" + o +
                 "' is not an object");
      }
      vocab.inherently_sensitive_.insert(std::move(o));
    }
  }
  if (root.contains("sensitive_tokens")) {
    vocab.sensitive_tokens_ =
        StringList(root["sensitive_tokens"], "sensitive_tokens", diag);
  }

  diag.ThrowIfAny(origin);

  const std::pair<Section, const std::vector<std::string>*> graph_sections[] = {
      {Section::kObject, &vocab.objects_},
      {Section::kAttribute, &vocab.attributes_},
      {Section::kPredicate, &vocab.predicates_}};
  for (const auto& [section, terms] : graph_sections) {
    for (const auto& term : *terms) {
      for (Category c : vocab.graph_terms_.find(term)->second.categories) {
        vocab.classes_by_category_[SectionIndex(section)]
                                  [static_cast<std::size_t>(c)]
                                      .push_back(term);
      }
    }
  }
  vocab.classes_by_category_[SectionIndex(Section::kTag)] =
      vocab.tags_by_category_;
  return vocab;
}

const Vocabulary& Vocabulary::Default() {
  static const Vocabulary* const kDefault =
      new Vocabulary(FromJson(DefaultVocabularyJson(), "<default>"));
  return *kDefault;
}

std::string Vocabulary::Canonicalize(std::string_view term) const {
  std::string folded = FoldTerm(term);
  auto it = synonyms_.find(folded);
  if (it != synonyms_.end()) return it->second;
  return folded;
}

bool Vocabulary::IsObject(std::string_view term) const {
  return Contains(Section::kObject, term);
}
bool Vocabulary::IsAttribute(std::string_view term) const {
  return Contains(Section::kAttribute, term);
}
bool Vocabulary::IsPredicate(std::string_view term) const {
  return Contains(Section::kPredicate, term);
}
bool Vocabulary::IsTag(std::string_view term) const {
  return tag_category_.find(term) != tag_category_.end();
}

bool Vocabulary::Contains(Section section, std::string_view term) const {
  if (section == Section::kTag) return IsTag(term);
  auto it = graph_terms_.find(term);
  return it != graph_terms_.end() && it->second.section == section;
}

const std::vector<std::string>& Vocabulary::terms(Section section) const {
  switch (section) {
    case Section::kObject:
      return objects_;
    case Section::kAttribute:
      return attributes_;
    case Section::kPredicate:
      return predicates_;
    case Section::kTag:
      return tags_;
  }
  return kEmptyTerms;
}

Category Vocabulary::TagCategory(std::string_view tag) const {
  auto it = tag_category_.find(tag);
  if (it == tag_category_.end()) {
    throw InvariantError("not a tag: " + std::string(tag));
  }
  return it->second;
}

const std::vector<Category>& Vocabulary::CategoriesOf(
    Section section, std::string_view term) const {
  auto it = graph_terms_.find(term);
  if (it == graph_terms_.end() || it->second.section != section) {
    return kNoCategories;
  }
  return it->second.categories;
}

const std::vector<std::string>& Vocabulary::ClassesIn(
    Section section, Category category) const {
  return classes_by_category_[SectionIndex(section)]
                             [static_cast<std::size_t>(category)];
}

std::string_view Vocabulary::GroupOf(std::string_view term) const {
  auto it = graph_terms_.find(term);
  if (it == graph_terms_.end()) return {};
  return it->second.group;
}

Vocabulary LoadVocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open vocabulary config: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Vocabulary::FromJson(buffer.str(), path.string());
}

std::optional<std::string> NormalizeTerm(std::string_view term,
                                         const Vocabulary& vocab) {
  std::string canonical = vocab.Canonicalize(term);
  if (vocab.IsTag(canonical) || vocab.IsObject(canonical) ||
      vocab.IsAttribute(canonical) || vocab.IsPredicate(canonical)) {
    return canonical;
  }
  return std::nullopt;
}

}  // namespace sgmod
