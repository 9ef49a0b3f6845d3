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

#ifndef SGMOD_SCENE_GRAPH_H_
#define SGMOD_SCENE_GRAPH_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sgmod/vocabulary.h"

namespace sgmod {

// Axis-aligned box in [y_min, x_min, y_max, x_max] order on a 0..1000 grid.
struct BoundingBox {
  static constexpr int kScale = 1000;

  int y_min = 0;
  int x_min = 0;
  int y_max = 0;
  int x_max = 0;

  bool IsValid() const {
    return 0 <= y_min && y_min <= y_max && y_max <= kScale && 0 <= x_min &&
           x_min <= x_max && x_max <= kScale;
  }
  std::int64_t Area() const {
    return static_cast<std::int64_t>(y_max - y_min) * (x_max - x_min);
  }

  auto operator<=>(const BoundingBox&) const = default;
};

// (class, identity) reference used by triplet endpoints. Identity 0 renders
// as the bare class name, n >= 1 as "class:n".
struct ObjectRef {
  std::string class_name;
  int identity = 0;

  std::string ToString() const;
  // Splits a trailing ":n" suffix. The class part is returned as written;
  // callers canonicalize it against a vocabulary.
  static ObjectRef Parse(std::string_view text);

  auto operator<=>(const ObjectRef&) const = default;
};

struct ObjectInstance {
  std::string class_name;
  std::optional<BoundingBox> box;
  std::set<std::string> attributes;
  int identity = 0;

  ObjectRef ref() const { return {class_name, identity}; }

  bool operator==(const ObjectInstance&) const = default;
};

struct Triplet {
  ObjectRef subject;
  std::string predicate;
  ObjectRef object;

  std::string ToString() const;

  bool operator==(const Triplet&) const = default;
};

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split split);
std::optional<Split> SplitFromName(std::string_view name);

struct FrameRecord {
  std::string frame_id;
  std::set<std::string> tags;
  std::string caption;
  std::vector<ObjectInstance> objects;
  std::vector<Triplet> triplets;
  std::optional<Split> split;
  std::optional<std::string> movie_id;
  // Native safe/unsafe decision of an external classifier. Ground truth
  // leaves it unset; when unset the frame is unsafe iff it has tags.
  std::optional<bool> unsafe;

  bool IsSensitive() const { return !tags.empty(); }
  bool IsUnsafe() const { return unsafe.value_or(!tags.empty()); }

  bool operator==(const FrameRecord&) const = default;
};

// Assigns per-class identities in raster-scan order: ascending
// (y_min, x_min, y_max, x_max), identical boxes keep input order. Output
// order matches input order. Boxless objects rank after boxed ones of their
// class.
std::vector<ObjectInstance> AssignSuffixIds(std::vector<ObjectInstance> objects);

// Index of the object with this (class, identity), if declared.
std::optional<std::size_t> FindObject(const std::vector<ObjectInstance>& objects,
                                      const ObjectRef& ref);

// Inherently sensitive class, or at least one vocabulary attribute.
bool IsSensitiveObject(const ObjectInstance& object, const Vocabulary& vocab);

struct ValidationReport {
  std::vector<std::string> out_of_vocabulary;
  std::vector<std::string> dangling_references;
  std::vector<std::string> box_violations;
  std::vector<std::string> duplicate_identities;

  bool clean() const {
    return out_of_vocabulary.empty() && dangling_references.empty() &&
           box_violations.empty() && duplicate_identities.empty();
  }
  std::string Summary() const;
};

// Never throws; lists every problem found.
ValidationReport ValidateGraph(const FrameRecord& frame,
                               const Vocabulary& vocab);

}  // namespace sgmod

#endif  // SGMOD_SCENE_GRAPH_H_
