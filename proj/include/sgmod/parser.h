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

// Readers and writers for scene-graph frames.
//
// Ground truth is strict JSONL: one frame object per line, any schema
// violation is an InputError naming the line and field. Model predictions
// are parsed leniently: ParsePrediction never throws and reports every
// fragment it had to discard. The file schema is documented in
// docs/formats.md.

#ifndef SGMOD_PARSER_H_
#define SGMOD_PARSER_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgmod/scene_graph.h"
#include "sgmod/vocabulary.h"

namespace sgmod {

enum class PredictionFormat { kAuto, kJsonGraph, kLocDetection, kSuffixTriplets };

std::string_view PredictionFormatName(PredictionFormat format);
std::optional<PredictionFormat> PredictionFormatFromName(std::string_view name);

struct RawPrediction {
  std::string frame_id;
  std::string payload;
  PredictionFormat format_hint = PredictionFormat::kAuto;
};

struct DroppedFragment {
  std::string fragment;
  std::string reason;

  bool operator==(const DroppedFragment&) const = default;
};

struct ParseOutcome {
  FrameRecord graph;
  // Tags, objects, and triplets that made it into `graph`.
  int recovered = 0;
  std::vector<DroppedFragment> dropped;
};

// Parses one ground-truth line. `line_number` is 1-based and only used in
// diagnostics.
FrameRecord ParseGroundTruthLine(std::string_view line, const Vocabulary& vocab,
                                 std::size_t line_number);

// Blank lines are skipped; everything else must be a complete frame.
std::vector<FrameRecord> ParseGroundTruth(std::istream& in,
                                          const Vocabulary& vocab);
std::vector<FrameRecord> ParseGroundTruthFile(const std::filesystem::path& path,
                                              const Vocabulary& vocab);

// Total: garbage in yields an empty graph with a non-empty `dropped` list.
ParseOutcome ParsePrediction(const RawPrediction& raw,
                             const Vocabulary& vocab) noexcept;

// Parses runs of "name<loc_a><loc_b><loc_c><loc_d>" (a run may carry several
// boxes in multiples of four). Runs with a coordinate outside [0, 1000] or a
// bad arity are dropped whole. Identities are assigned in raster order.
std::vector<ObjectInstance> ParseLocDetection(
    std::string_view text, const Vocabulary& vocab,
    std::vector<DroppedFragment>* dropped = nullptr);

// Parses "subject predicate object" clauses separated by newlines or ';'.
// Endpoints are "term" or "term:n".
std::vector<Triplet> ParseSuffixTriplets(
    std::string_view text, const Vocabulary& vocab,
    std::vector<DroppedFragment>* dropped = nullptr);

// JSON form of a frame without validation (used for logs).
nlohmann::json GraphToJson(const FrameRecord& frame);

// Canonical single-line JSON with sorted keys. Throws InputError when the
// frame is not clean under ValidateGraph.
std::string SerializeGraph(const FrameRecord& frame, const Vocabulary& vocab);

}  // namespace sgmod

#endif  // SGMOD_PARSER_H_
