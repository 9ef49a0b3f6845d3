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

#include "testing/synthetic.h"

#include <algorithm>
#include <set>

#include "sgmod/parser.h"

namespace sgmod::testing {
namespace {

template <typename T>
const T& Pick(std::mt19937_64& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> dist(0, items.size() - 1);
  return items[dist(rng)];
}

int Uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

BoundingBox RandomBox(std::mt19937_64& rng) {
  BoundingBox b;
  b.y_min = Uniform(rng, 0, 900);
  b.x_min = Uniform(rng, 0, 900);
  b.y_max = Uniform(rng, b.y_min + 1, 1000);
  b.x_max = Uniform(rng, b.x_min + 1, 1000);
  return b;
}

// Boxes are unique per class so self-matching has a single optimum.
BoundingBox FreshBox(std::mt19937_64& rng, const std::vector<ObjectInstance>& objects,
                     const std::string& cls) {
  for (;;) {
    const BoundingBox b = RandomBox(rng);
    const bool taken = std::any_of(objects.begin(), objects.end(), [&](const auto& o) {
      return o.class_name == cls && o.box == b;
    });
    if (!taken) return b;
  }
}

std::string RandomCaption(std::mt19937_64& rng) {
  static const std::vector<std::string> kPieces = {
      "a",  "man",  "holds",  "\"quoted\"", "back\\slash", "caf\xC3\xA9",
      "\xE2\x80\x94", "\xE6\x98\xA0\xE7\x94\xBB", "tab\there", "'single'", "{brace}",
      "[list]", "emoji\xF0\x9F\x8E\xAC", ",", "line"};
  std::string out;
  const int words = Uniform(rng, 0, 8);
  for (int i = 0; i < words; ++i) {
    if (i > 0) out += ' ';
    out += Pick(rng, kPieces);
  }
  return out;
}

std::vector<std::string> Without(const std::vector<std::string>& items,
                                 const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (std::find(drop.begin(), drop.end(), item) == drop.end()) out.push_back(item);
  }
  return out;
}

}  // namespace

FrameRecord RandomCleanFrame(std::mt19937_64& rng, const Vocabulary& vocab,
                             const std::string& frame_id) {
  FrameRecord frame;
  frame.frame_id = frame_id;
  const int tags = Uniform(rng, 0, 3);
  for (int i = 0; i < tags; ++i) frame.tags.insert(Pick(rng, vocab.tags()));
  frame.caption = RandomCaption(rng);

  const int objects = Uniform(rng, 0, 6);
  for (int i = 0; i < objects; ++i) {
    ObjectInstance o;
    // Reuse a class now and then to exercise suffix identities.
    o.class_name = (!frame.objects.empty() && Uniform(rng, 0, 3) == 0)
                       ? frame.objects.back().class_name
                       : Pick(rng, vocab.objects());
    o.box = FreshBox(rng, frame.objects, o.class_name);
    const int attrs = Uniform(rng, 0, 3);
    for (int k = 0; k < attrs; ++k) o.attributes.insert(Pick(rng, vocab.attributes()));
    frame.objects.push_back(std::move(o));
  }
  frame.objects = AssignSuffixIds(std::move(frame.objects));

  if (!frame.objects.empty()) {
    const int triplets = Uniform(rng, 0, 4);
    for (int i = 0; i < triplets; ++i) {
      frame.triplets.push_back({Pick(rng, frame.objects).ref(),
                                Pick(rng, vocab.predicates()),
                                Pick(rng, frame.objects).ref()});
    }
  }
  switch (Uniform(rng, 0, 3)) {
    case 0:
      frame.split = Split::kTrain;
      break;
    case 1:
      frame.split = Split::kTest;
      break;
    default:
      break;
  }
  if (Uniform(rng, 0, 1) == 1) frame.movie_id = "movie_" + std::to_string(Uniform(rng, 0, 99));
  if (Uniform(rng, 0, 4) == 0) frame.unsafe = Uniform(rng, 0, 1) == 1;
  return frame;
}

std::vector<FrameRecord> SyntheticCorpus(std::size_t count, std::uint64_t seed,
                                         const Vocabulary& vocab) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> persons = {"male", "female", "child"};
  std::vector<FrameRecord> frames;
  frames.reserve(count);
  std::size_t sensitive_index = 0;
  for (std::size_t i = 0; i < count; ++i) {
    FrameRecord frame;
    frame.frame_id = "syn_" + std::to_string(i);
    frame.caption = "synthetic frame " + std::to_string(i);
    if (i % 6 == 5) {
      ObjectInstance person{Pick(rng, persons), RandomBox(rng), {}, 0};
      frame.objects.push_back(std::move(person));
      frames.push_back(std::move(frame));
      continue;
    }
    const Category category = kAllCategories[sensitive_index++ % kNumCategories];
    frame.tags.insert(Pick(rng, vocab.TagsIn(category)));
    if (Uniform(rng, 0, 2) == 0) frame.tags.insert(Pick(rng, vocab.TagsIn(category)));

    const auto& object_pool = vocab.ClassesIn(Section::kObject, category);
    const auto& attribute_pool = vocab.ClassesIn(Section::kAttribute, category);
    const auto& predicate_pool = vocab.ClassesIn(Section::kPredicate, category);
    const auto specific_objects = Without(object_pool, persons);

    ObjectInstance person;
    person.class_name = Pick(rng, persons);
    person.box = FreshBox(rng, frame.objects, person.class_name);
    person.attributes.insert(Pick(rng, attribute_pool));
    if (Uniform(rng, 0, 1) == 1) person.attributes.insert(Pick(rng, attribute_pool));
    frame.objects.push_back(person);

    ObjectInstance other;
    other.class_name =
        specific_objects.empty() ? Pick(rng, persons) : Pick(rng, specific_objects);
    other.box = FreshBox(rng, frame.objects, other.class_name);
    if (!vocab.IsInherentlySensitive(other.class_name) || Uniform(rng, 0, 2) == 0) {
      other.attributes.insert(Pick(rng, attribute_pool));
    }
    frame.objects.push_back(other);

    if (Uniform(rng, 0, 2) == 0) {
      ObjectInstance second;
      second.class_name = person.class_name;
      second.box = FreshBox(rng, frame.objects, second.class_name);
      second.attributes.insert(Pick(rng, attribute_pool));
      frame.objects.push_back(second);
    }
    frame.objects = AssignSuffixIds(std::move(frame.objects));

    frame.triplets.push_back({frame.objects[0].ref(), Pick(rng, predicate_pool),
                              frame.objects[1].ref()});
    if (frame.objects.size() > 2) {
      frame.triplets.push_back({frame.objects[2].ref(), Pick(rng, predicate_pool),
                                frame.objects[0].ref()});
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<SplitShape> PublishedSplitShapes() {
  return {
      {Split::kTrain, 4999, 5000, 95,
       {734, 370, 143, 371, 579, 248, 182, 216, 1792, 315, 985, 243, 100, 63, 196, 188}},
      {Split::kVal, 1000, 1000, 31,
       {177, 62, 25, 61, 104, 47, 23, 29, 374, 54, 216, 40, 11, 7, 23, 20}},
      {Split::kTest, 989, 1011, 31,
       {155, 88, 31, 68, 111, 49, 28, 44, 355, 69, 201, 47, 20, 8, 29, 29}},
  };
}

std::vector<FrameRecord> SplitShapedDataset(const std::vector<SplitShape>& shapes,
                                            const Vocabulary& vocab) {
  std::vector<FrameRecord> frames;
  for (const auto& shape : shapes) {
    const std::string split(SplitName(shape.split));
    const std::size_t first = frames.size();
    const int total = shape.sensitive + shape.general;
    for (int i = 0; i < total; ++i) {
      FrameRecord frame;
      frame.frame_id = split + "_" + std::to_string(i);
      frame.split = shape.split;
      frame.movie_id = split + "_movie_" + std::to_string(i % shape.movies);
      frames.push_back(std::move(frame));
    }
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < shape.tag_counts.size(); ++t) {
      for (int n = 0; n < shape.tag_counts[t]; ++n) {
        frames[first + cursor % static_cast<std::size_t>(shape.sensitive)].tags.insert(
            vocab.tags()[t]);
        ++cursor;
      }
    }
  }
  return frames;
}

std::string ToJsonl(const std::vector<FrameRecord>& frames, const Vocabulary& vocab) {
  std::string out;
  for (const auto& frame : frames) {
    out += SerializeGraph(frame, vocab);
    out += '\n';
  }
  return out;
}

}  // namespace sgmod::testing
