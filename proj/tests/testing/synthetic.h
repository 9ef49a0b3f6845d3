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

// Seeded generators for test corpora.

#ifndef SGMOD_TESTS_TESTING_SYNTHETIC_H_
#define SGMOD_TESTS_TESTING_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sgmod/scene_graph.h"
#include "sgmod/vocabulary.h"

namespace sgmod::testing {

inline constexpr std::uint64_t kDefaultSeed = 20260415;

// A frame that passes ValidateGraph: vocabulary terms only, valid boxes,
// raster-order identities, triplets between declared objects. Captions mix
// ASCII, escapes, and multi-byte UTF-8.
FrameRecord RandomCleanFrame(std::mt19937_64& rng, const Vocabulary& vocab,
                             const std::string& frame_id);

// Frames cycling through the five categories, each carrying a tag, a
// sensitive person, a category object, attributes, and a triplet of that
// category, so every category has defined classes in every component. Every
// sixth frame is general (untagged, no sensitive content).
std::vector<FrameRecord> SyntheticCorpus(std::size_t frames, std::uint64_t seed,
                                         const Vocabulary& vocab);

struct SplitShape {
  Split split;
  int sensitive;
  int general;
  int movies;
  // Frames per tag, in vocabulary tag order.
  std::vector<int> tag_counts;
};

// Split sizes, movie counts, and per-tag frame counts of the published
// dataset overview.
std::vector<SplitShape> PublishedSplitShapes();

// Tags are dealt round-robin over each split's sensitive frames; movies are
// assigned round-robin over all frames of a split.
std::vector<FrameRecord> SplitShapedDataset(const std::vector<SplitShape>& shapes,
                                            const Vocabulary& vocab);

// One canonical JSON line per frame.
std::string ToJsonl(const std::vector<FrameRecord>& frames, const Vocabulary& vocab);

}  // namespace sgmod::testing

#endif  // SGMOD_TESTS_TESTING_SYNTHETIC_H_
