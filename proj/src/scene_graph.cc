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

#include "sgmod/scene_graph.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace sgmod {

std::string ObjectRef::ToString() const {
  if (identity == 0) return class_name;
  return class_name + ":" + std::to_string(identity);
}

ObjectRef ObjectRef::Parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon != std::string_view::npos && colon > 0 &&
      colon + 1 < text.size()) {
    const std::string_view digits = text.substr(colon + 1);
    int value = 0;
    const auto [end, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc() && end == digits.data() + digits.size() &&
        value >= 0) {
      return {std::string(text.substr(0, colon)), value};
    }
  }
  return {std::string(text), 0};
}

std::string Triplet::ToString() const {
  return subject.ToString() + " " + predicate + " " + object.ToString();
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

std::optional<Split> SplitFromName(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<ObjectInstance> AssignSuffixIds(
    std::vector<ObjectInstance> objects) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    by_class[objects[i].class_name].push_back(i);
  }
  for (auto& [name, indices] : by_class) {
    (void)name;
    std::stable_sort(indices.begin(), indices.end(),
                     [&](std::size_t a, std::size_t b) {
                       const auto& ba = objects[a].box;
                       const auto& bb = objects[b].box;
                       if (!ba || !bb) return ba.has_value() && !bb.has_value();
                       return std::tie(ba->y_min, ba->x_min, ba->y_max,
                                       ba->x_max) <
                              std::tie(bb->y_min, bb->x_min, bb->y_max,
                                       bb->x_max);
                     });
    for (std::size_t rank = 0; rank < indices.size(); ++rank) {
      objects[indices[rank]].identity = static_cast<int>(rank);
    }
  }
  return objects;
}

std::optional<std::size_t> FindObject(
    const std::vector<ObjectInstance>& objects, const ObjectRef& ref) {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].class_name == ref.class_name &&
        objects[i].identity == ref.identity) {
      return i;
    }
  }
  return std::nullopt;
}

bool IsSensitiveObject(const ObjectInstance& object, const Vocabulary& vocab) {
  if (vocab.IsInherentlySensitive(object.class_name)) return true;
  return std::any_of(
      object.attributes.begin(), object.attributes.end(),
      [&](const std::string& a) { return vocab.IsAttribute(a); });
}

std::string ValidationReport::Summary() const {
  std::ostringstream out;
  auto section = [&](const char* title, const std::vector<std::string>& items) {
    for (const auto& item : items) out << title << ": " << item << "\n";
  };
  section("out-of-vocabulary", out_of_vocabulary);
  section("dangling reference", dangling_references);
  section("box violation", box_violations);
  section("duplicate identity", duplicate_identities);
  return out.str();
}

ValidationReport ValidateGraph(const FrameRecord& frame,
                               const Vocabulary& vocab) {
  ValidationReport report;
  for (const auto& tag : frame.tags) {
    if (!vocab.IsTag(tag)) report.out_of_vocabulary.push_back("tag " + tag);
  }
  std::set<ObjectRef> seen;
  for (std::size_t i = 0; i < frame.objects.size(); ++i) {
    const auto& object = frame.objects[i];
    const std::string name = object.ref().ToString();
    if (!vocab.IsObject(object.class_name)) {
      report.out_of_vocabulary.push_back("object " + object.class_name);
    }
    for (const auto& attribute : object.attributes) {
      if (!vocab.IsAttribute(attribute)) {
        report.out_of_vocabulary.push_back("attribute " + attribute + " on " +
                                           name);
      }
    }
    if (object.box && !object.box->IsValid()) {
      const auto& b = *object.box;
      report.box_violations.push_back(
          name + " [" + std::to_string(b.y_min) + "," + std::to_string(b.x_min) +
          "," + std::to_string(b.y_max) + "," + std::to_string(b.x_max) + "]");
    }
    if (object.identity < 0 || !seen.insert(object.ref()).second) {
      report.duplicate_identities.push_back(name);
    }
  }
  for (const auto& triplet : frame.triplets) {
    if (!vocab.IsPredicate(triplet.predicate)) {
      report.out_of_vocabulary.push_back("predicate " + triplet.predicate);
    }
    for (const ObjectRef* end : {&triplet.subject, &triplet.object}) {
      if (!seen.contains(*end)) {
        report.dangling_references.push_back(end->ToString() + " in '" +
                                             triplet.ToString() + "'");
      }
    }
  }
  return report;
}

}  // namespace sgmod
