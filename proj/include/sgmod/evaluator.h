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

// Evaluation driver: pairs ground-truth frames with predictions, runs
// per-frame matching on a bounded worker pool, and merges the counts in
// frame order.

#ifndef SGMOD_EVALUATOR_H_
#define SGMOD_EVALUATOR_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmod/matching.h"
#include "sgmod/metrics.h"
#include "sgmod/parser.h"
#include "sgmod/scene_graph.h"
#include "sgmod/vocabulary.h"

namespace sgmod {

struct EvaluationOptions {
  double iou_threshold = kDefaultIouThreshold;
  // 0 picks std::thread::hardware_concurrency().
  std::size_t workers = 1;
  // Optional caption embeddings; not owned.
  const EmbeddingSidecar* embeddings = nullptr;
};

struct FrameResult {
  std::string frame_id;
  Assignment assignment;
  ComponentCounts counts;
  bool gt_unsafe = false;
  bool pred_unsafe = false;
  bool prediction_missing = false;
};

// `pred` may be null, in which case the frame is scored as an empty
// prediction.
FrameResult EvaluateFrame(const FrameRecord& gt, const FrameRecord* pred,
                          const Vocabulary& vocab, double iou_threshold);

// Predictions whose id is not in `gt` are ignored and counted in
// extra_predictions. When `per_frame` is non-null it receives one result per
// ground-truth frame, in input order.
EvaluationTotals Evaluate(std::span<const FrameRecord> gt,
                          const std::map<std::string, FrameRecord>& predictions,
                          const Vocabulary& vocab,
                          const EvaluationOptions& options,
                          std::vector<FrameResult>* per_frame = nullptr);

struct PredictionFailure {
  std::size_t line = 0;
  std::string frame_id;  // empty when the line could not be attributed
  std::vector<DroppedFragment> dropped;
};

struct PredictionSet {
  std::map<std::string, FrameRecord> frames;
  std::vector<PredictionFailure> failures;
  std::int64_t duplicate_ids = 0;
  std::int64_t unattributed_lines = 0;
};

// Reads a predictions JSONL file. Each line is either an envelope
// {"frame_id", "output", "format"?} holding raw model text, or a frame
// graph carrying its own "frame_id". Lines that are not valid JSON are
// repaired where possible; the frame id is then recovered textually. The
// first line for an id wins; later ones are counted as duplicates.
PredictionSet ReadPredictions(std::istream& in, const Vocabulary& vocab);

// One match-log record: the pairing, unmatched indices, and per-component
// counts of a frame.
nlohmann::json MatchLogRecord(const FrameResult& result, const FrameRecord& gt,
                              const FrameRecord* pred);

}  // namespace sgmod

#endif  // SGMOD_EVALUATOR_H_
