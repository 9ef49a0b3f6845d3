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

#include "sgmod/evaluator.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <regex>
#include <thread>

namespace sgmod {
namespace {

using nlohmann::json;

std::size_t ResolveWorkers(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

json CountsJson(const ClassCounts& counts) {
  json out = json::object();
  for (const auto& [cls, t] : counts.tallies()) {
    if (t.tp + t.fp + t.fn == 0) continue;
    out[cls] = {{"tp", t.tp}, {"fp", t.fp}, {"fn", t.fn}};
  }
  return out;
}

std::string ExtractFrameId(const std::string& line) {
  static const std::regex kFrameId(R"re("frame_id"\s*:\s*"((?:[^"\\]|\\.)*)")re");
  std::smatch m;
  if (std::regex_search(line, m, kFrameId)) return m[1].str();
  return {};
}

}  // namespace

FrameResult EvaluateFrame(const FrameRecord& gt, const FrameRecord* pred,
                          const Vocabulary& vocab, double iou_threshold) {
  static const FrameRecord kEmpty;
  const FrameRecord& p = pred ? *pred : kEmpty;
  FrameResult result;
  result.frame_id = gt.frame_id;
  result.prediction_missing = pred == nullptr;
  result.assignment = MatchObjects(gt.objects, p.objects, iou_threshold);
  result.counts[Component::kTag] = MatchTags(gt.tags, p.tags);
  result.counts[Component::kObject] =
      TallyObjects(result.assignment, gt.objects, p.objects, vocab);
  result.counts[Component::kAttribute] =
      MatchAttributes(result.assignment, gt.objects, p.objects, vocab);
  result.counts[Component::kPredicate] =
      MatchTriplets(gt, p, result.assignment, vocab);
  result.gt_unsafe = gt.IsUnsafe();
  result.pred_unsafe = pred ? pred->IsUnsafe() : false;
  return result;
}

EvaluationTotals Evaluate(std::span<const FrameRecord> gt,
                          const std::map<std::string, FrameRecord>& predictions,
                          const Vocabulary& vocab,
                          const EvaluationOptions& options,
                          std::vector<FrameResult>* per_frame) {
  std::vector<FrameResult> results(gt.size());
  auto run = [&](std::size_t i) {
    auto it = predictions.find(gt[i].frame_id);
    const FrameRecord* pred = it == predictions.end() ? nullptr : &it->second;
    results[i] = EvaluateFrame(gt[i], pred, vocab, options.iou_threshold);
  };

  const std::size_t workers = ResolveWorkers(options.workers, gt.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < gt.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < gt.size(); i = next++) {
          try {
            run(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
  }

  EvaluationTotals totals;
  std::set<std::string> gt_ids;
  std::vector<std::string> frame_ids;
  frame_ids.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const FrameResult& r = results[i];
    totals.components.MergeFrame(r.counts);
    totals.safety.Add(r.gt_unsafe, r.pred_unsafe);
    ++totals.frame_count;
    if (gt[i].IsSensitive()) {
      ++totals.sensitive_count;
    } else {
      ++totals.general_count;
    }
    if (r.prediction_missing) ++totals.missing_predictions;
    gt_ids.insert(gt[i].frame_id);
    frame_ids.push_back(gt[i].frame_id);
  }
  for (const auto& [id, frame] : predictions) {
    if (!gt_ids.contains(id)) ++totals.extra_predictions;
  }
  if (options.embeddings) {
    totals.caption = CaptionSimilarity(frame_ids, *options.embeddings);
  }
  if (per_frame) *per_frame = std::move(results);
  return totals;
}

PredictionSet ReadPredictions(std::istream& in, const Vocabulary& vocab) {
  PredictionSet set;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    RawPrediction raw;
    json root = json::parse(line, nullptr, false);
    if (root.is_object() && root.contains("frame_id") &&
        root["frame_id"].is_string()) {
      raw.frame_id = root["frame_id"].get<std::string>();
      if (root.contains("output")) {
        const json& output = root["output"];
        raw.payload = output.is_string()
                          ? output.get<std::string>()
                          : output.dump(-1, ' ', false,
                                        json::error_handler_t::replace);
        if (root.contains("format") && root["format"].is_string()) {
          raw.format_hint = PredictionFormatFromName(root["format"].get<std::string>())
                                .value_or(PredictionFormat::kAuto);
        }
      } else {
        raw.payload = line;
        raw.format_hint = PredictionFormat::kJsonGraph;
      }
    } else {
      raw.frame_id = ExtractFrameId(line);
      raw.payload = line;
    }

    if (raw.frame_id.empty()) {
      ++set.unattributed_lines;
      set.failures.push_back(
          {line_number, "", {{line.substr(0, 200), "no frame_id"}}});
      continue;
    }
    if (set.frames.contains(raw.frame_id)) {
      ++set.duplicate_ids;
      continue;
    }
    ParseOutcome outcome = ParsePrediction(raw, vocab);
    if (!outcome.dropped.empty()) {
      set.failures.push_back({line_number, raw.frame_id, outcome.dropped});
    }
    set.frames.emplace(raw.frame_id, std::move(outcome.graph));
  }
  return set;
}

json MatchLogRecord(const FrameResult& result, const FrameRecord& gt,
                    const FrameRecord* pred) {
  json pairs = json::array();
  for (const auto& pair : result.assignment.pairs) {
    pairs.push_back({{"gt", gt.objects[pair.gt_index].ref().ToString()},
                     {"pred", pred->objects[pair.pred_index].ref().ToString()},
                     {"iou", pair.iou}});
  }
  json unmatched_gt = json::array();
  for (std::size_t i : result.assignment.unmatched_gt) {
    unmatched_gt.push_back(gt.objects[i].ref().ToString());
  }
  json unmatched_pred = json::array();
  for (std::size_t i : result.assignment.unmatched_pred) {
    unmatched_pred.push_back(pred->objects[i].ref().ToString());
  }
  json counts = json::object();
  for (Component c : kAllComponents) {
    counts[std::string(ComponentName(c))] = CountsJson(result.counts[c]);
  }
  return {{"frame_id", result.frame_id},
          {"prediction_missing", result.prediction_missing},
          {"gt_unsafe", result.gt_unsafe},
          {"pred_unsafe", result.pred_unsafe},
          {"pairs", std::move(pairs)},
          {"unmatched_gt", std::move(unmatched_gt)},
          {"unmatched_pred", std::move(unmatched_pred)},
          {"counts", std::move(counts)}};
}

}  // namespace sgmod
