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

#include "sgmod/matching.h"

#include <algorithm>
#include <optional>

#include "sgmod/hungarian.h"
#include "sgmod/matrix.h"

namespace sgmod {

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t ih =
      std::max(0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const std::int64_t iw =
      std::max(0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const std::int64_t inter = ih * iw;
  const std::int64_t uni = a.Area() + b.Area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ClassTally ClassCounts::Get(const std::string& cls) const {
  auto it = tallies_.find(cls);
  return it == tallies_.end() ? ClassTally{} : it->second;
}

std::int64_t ClassCounts::TotalTp() const {
  std::int64_t n = 0;
  for (const auto& [cls, t] : tallies_) n += t.tp;
  return n;
}
std::int64_t ClassCounts::TotalFp() const {
  std::int64_t n = 0;
  for (const auto& [cls, t] : tallies_) n += t.fp;
  return n;
}
std::int64_t ClassCounts::TotalFn() const {
  std::int64_t n = 0;
  for (const auto& [cls, t] : tallies_) n += t.fn;
  return n;
}

void ClassCounts::Merge(const ClassCounts& other) {
  for (const auto& [cls, t] : other.tallies_) {
    ClassTally& mine = tallies_[cls];
    mine.tp += t.tp;
    mine.fp += t.fp;
    mine.fn += t.fn;
    mine.recall_sum += t.recall_sum;
    mine.recall_frames += t.recall_frames;
    mine.precision_sum += t.precision_sum;
    mine.precision_frames += t.precision_frames;
  }
}

void ClassCounts::MergeFrame(const ClassCounts& frame) {
  for (const auto& [cls, t] : frame.tallies_) {
    ClassTally& mine = tallies_[cls];
    mine.tp += t.tp;
    mine.fp += t.fp;
    mine.fn += t.fn;
    if (t.tp + t.fn > 0) {
      mine.recall_sum += static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
      ++mine.recall_frames;
    }
    if (t.tp + t.fp > 0) {
      mine.precision_sum +=
          static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
      ++mine.precision_frames;
    }
  }
}

Assignment MatchObjects(const std::vector<ObjectInstance>& gt,
                        const std::vector<ObjectInstance>& pred,
                        double threshold) {
  // Group indices by class; only boxed objects take part.
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      blocks;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].box) blocks[gt[i].class_name].first.push_back(i);
  }
  for (std::size_t j = 0; j < pred.size(); ++j) {
    if (pred[j].box) blocks[pred[j].class_name].second.push_back(j);
  }

  Assignment result;
  std::vector<char> gt_matched(gt.size(), 0), pred_matched(pred.size(), 0);
  for (const auto& [cls, block] : blocks) {
    (void)cls;
    const auto& [gi, pj] = block;
    if (gi.empty() || pj.empty()) continue;
    Matrix cost(gi.size(), pj.size());
    for (std::size_t r = 0; r < gi.size(); ++r) {
      for (std::size_t c = 0; c < pj.size(); ++c) {
        cost(r, c) = 1.0 - Iou(*gt[gi[r]].box, *pred[pj[c]].box);
      }
    }
    for (const auto& [r, c] : HungarianSolve(cost)) {
      const double iou = Iou(*gt[gi[r]].box, *pred[pj[c]].box);
      if (iou < threshold) continue;
      result.pairs.push_back({gi[r], pj[c], iou});
      gt_matched[gi[r]] = 1;
      pred_matched[pj[c]] = 1;
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) {
              return a.gt_index < b.gt_index;
            });
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_matched[i]) result.unmatched_gt.push_back(i);
  }
  for (std::size_t j = 0; j < pred.size(); ++j) {
    if (!pred_matched[j]) result.unmatched_pred.push_back(j);
  }
  return result;
}

ClassCounts TallyObjects(const Assignment& assignment,
                         const std::vector<ObjectInstance>& gt,
                         const std::vector<ObjectInstance>& pred,
                         const Vocabulary& vocab) {
  ClassCounts counts;
  auto counted = [&](const ObjectInstance& o) {
    return vocab.IsObject(o.class_name) && IsSensitiveObject(o, vocab);
  };
  for (const auto& pair : assignment.pairs) {
    const auto& g = gt[pair.gt_index];
    if (counted(g)) counts.AddTp(g.class_name);
  }
  for (std::size_t i : assignment.unmatched_gt) {
    if (counted(gt[i])) counts.AddFn(gt[i].class_name);
  }
  for (std::size_t j : assignment.unmatched_pred) {
    if (counted(pred[j])) counts.AddFp(pred[j].class_name);
  }
  return counts;
}

ClassCounts MatchAttributes(const Assignment& assignment,
                            const std::vector<ObjectInstance>& gt,
                            const std::vector<ObjectInstance>& pred,
                            const Vocabulary& vocab) {
  ClassCounts counts;
  for (const auto& pair : assignment.pairs) {
    const auto& g = gt[pair.gt_index].attributes;
    const auto& p = pred[pair.pred_index].attributes;
    for (const auto& a : g) {
      if (!vocab.IsAttribute(a)) continue;
      if (p.contains(a)) {
        counts.AddTp(a);
      } else {
        counts.AddFn(a);
      }
    }
    for (const auto& a : p) {
      if (vocab.IsAttribute(a) && !g.contains(a)) counts.AddFp(a);
    }
  }
  for (std::size_t i : assignment.unmatched_gt) {
    for (const auto& a : gt[i].attributes) {
      if (vocab.IsAttribute(a)) counts.AddFn(a);
    }
  }
  for (std::size_t j : assignment.unmatched_pred) {
    for (const auto& a : pred[j].attributes) {
      if (vocab.IsAttribute(a)) counts.AddFp(a);
    }
  }
  return counts;
}

ClassCounts MatchTriplets(const FrameRecord& gt, const FrameRecord& pred,
                          const Assignment& assignment,
                          const Vocabulary& vocab) {
  const bool ungrounded =
      std::none_of(pred.objects.begin(), pred.objects.end(),
                   [](const ObjectInstance& o) { return o.box.has_value(); });

  // Predicted endpoint -> ground-truth endpoint it stands for.
  std::map<ObjectRef, ObjectRef> pred_to_gt;
  for (const auto& pair : assignment.pairs) {
    pred_to_gt.emplace(pred.objects[pair.pred_index].ref(),
                       gt.objects[pair.gt_index].ref());
  }
  auto corresponds = [&](const ObjectRef& p, const ObjectRef& g) {
    if (ungrounded) return p == g;
    auto it = pred_to_gt.find(p);
    return it != pred_to_gt.end() && it->second == g;
  };

  ClassCounts counts;
  std::vector<char> consumed(gt.triplets.size(), 0);
  for (const auto& p : pred.triplets) {
    if (!vocab.IsPredicate(p.predicate)) continue;
    const bool symmetric = vocab.IsSymmetric(p.predicate);
    bool hit = false;
    for (std::size_t k = 0; k < gt.triplets.size(); ++k) {
      const auto& g = gt.triplets[k];
      if (consumed[k] || g.predicate != p.predicate) continue;
      const bool forward =
          corresponds(p.subject, g.subject) && corresponds(p.object, g.object);
      const bool reverse = symmetric && corresponds(p.subject, g.object) &&
                           corresponds(p.object, g.subject);
      if (forward || reverse) {
        consumed[k] = 1;
        hit = true;
        break;
      }
    }
    if (hit) {
      counts.AddTp(p.predicate);
    } else {
      counts.AddFp(p.predicate);
    }
  }
  for (std::size_t k = 0; k < gt.triplets.size(); ++k) {
    const auto& g = gt.triplets[k];
    if (!consumed[k] && vocab.IsPredicate(g.predicate)) counts.AddFn(g.predicate);
  }
  return counts;
}

ClassCounts MatchTags(const std::set<std::string>& gt_tags,
                      const std::set<std::string>& pred_tags) {
  ClassCounts counts;
  for (const auto& t : gt_tags) {
    if (pred_tags.contains(t)) {
      counts.AddTp(t);
    } else {
      counts.AddFn(t);
    }
  }
  for (const auto& t : pred_tags) {
    if (!gt_tags.contains(t)) counts.AddFp(t);
  }
  return counts;
}

}  // namespace sgmod
