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

// Per-frame correspondence between a ground-truth graph and a prediction.
//
// Objects are paired by Hungarian assignment on a class-aware IoU matrix;
// attributes and triplets are scored over that pairing. All tallies are
// restricted to vocabulary terms: out-of-vocabulary classes never count as
// tp, fp, or fn.

#ifndef SGMOD_MATCHING_H_
#define SGMOD_MATCHING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sgmod/scene_graph.h"
#include "sgmod/vocabulary.h"

namespace sgmod {

inline constexpr double kDefaultIouThreshold = 0.5;

// Intersection over union; 0 when the union is empty.
double Iou(const BoundingBox& a, const BoundingBox& b);

struct MatchedPair {
  std::size_t gt_index = 0;
  std::size_t pred_index = 0;
  double iou = 0.0;

  bool operator==(const MatchedPair&) const = default;
};

struct Assignment {
  std::vector<MatchedPair> pairs;  // sorted by gt_index
  std::vector<std::size_t> unmatched_gt;
  std::vector<std::size_t> unmatched_pred;

  bool operator==(const Assignment&) const = default;
};

// Counts for one class. The ratio sums feed per-frame averaging: each frame
// where a class has tp+fn > 0 (resp. tp+fp > 0) contributes its recall
// (resp. precision) once.
struct ClassTally {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double recall_sum = 0.0;
  std::int64_t recall_frames = 0;
  double precision_sum = 0.0;
  std::int64_t precision_frames = 0;

  bool operator==(const ClassTally&) const = default;
};

class ClassCounts {
 public:
  void AddTp(const std::string& cls, std::int64_t n = 1) { tallies_[cls].tp += n; }
  void AddFp(const std::string& cls, std::int64_t n = 1) { tallies_[cls].fp += n; }
  void AddFn(const std::string& cls, std::int64_t n = 1) { tallies_[cls].fn += n; }

  // Zero tally for classes never seen.
  ClassTally Get(const std::string& cls) const;
  const std::map<std::string, ClassTally>& tallies() const { return tallies_; }

  std::int64_t TotalTp() const;
  std::int64_t TotalFp() const;
  std::int64_t TotalFn() const;

  // Plain sum of every field.
  void Merge(const ClassCounts& other);
  // Adds a single frame's counts and records that frame's per-class ratios.
  void MergeFrame(const ClassCounts& frame);

  bool operator==(const ClassCounts&) const = default;

 private:
  std::map<std::string, ClassTally> tallies_;
};

// Same-class pairs cost 1 - IoU; the problem decomposes per class, so each
// class block is solved independently. Pairs below `threshold` are removed
// after solving. Predictions without boxes are never matched.
Assignment MatchObjects(const std::vector<ObjectInstance>& gt,
                        const std::vector<ObjectInstance>& pred,
                        double threshold = kDefaultIouThreshold);

// Object recall/precision tallies. Only sensitive objects count: a matched
// pair is a tp when the ground-truth object is sensitive; unmatched sensitive
// ground truth is fn; unmatched sensitive predictions are fp.
ClassCounts TallyObjects(const Assignment& assignment,
                         const std::vector<ObjectInstance>& gt,
                         const std::vector<ObjectInstance>& pred,
                         const Vocabulary& vocab);

ClassCounts MatchAttributes(const Assignment& assignment,
                            const std::vector<ObjectInstance>& gt,
                            const std::vector<ObjectInstance>& pred,
                            const Vocabulary& vocab);

// Greedy: predictions in emitted order each consume the first unconsumed
// ground-truth triplet with the same predicate whose endpoints correspond
// under the object assignment (either orientation for symmetric predicates).
// When no predicted object carries a box, endpoints correspond by
// (class, identity) equality instead.
ClassCounts MatchTriplets(const FrameRecord& gt, const FrameRecord& pred,
                          const Assignment& assignment, const Vocabulary& vocab);

ClassCounts MatchTags(const std::set<std::string>& gt_tags,
                      const std::set<std::string>& pred_tags);

}  // namespace sgmod

#endif  // SGMOD_MATCHING_H_
