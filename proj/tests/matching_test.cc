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

#include <gtest/gtest.h>

namespace sgmod {
namespace {

const Vocabulary& V() { return Vocabulary::Default(); }

ObjectInstance Obj(std::string cls, std::optional<BoundingBox> box,
                   std::set<std::string> attrs = {}, int id = 0) {
  return {std::move(cls), box, std::move(attrs), id};
}

void ExpectCounts(const ClassCounts& c, const std::string& cls, std::int64_t tp,
                  std::int64_t fp, std::int64_t fn) {
  const ClassTally t = c.Get(cls);
  EXPECT_EQ(t.tp, tp) << cls;
  EXPECT_EQ(t.fp, fp) << cls;
  EXPECT_EQ(t.fn, fn) << cls;
}

TEST(IouTest, Values) {
  const BoundingBox a{0, 0, 100, 100};
  EXPECT_EQ(Iou(a, a), 1.0);
  EXPECT_EQ(Iou(a, BoundingBox{0, 50, 100, 150}), 5000.0 / 15000.0);
  EXPECT_EQ(Iou(a, BoundingBox{200, 200, 300, 300}), 0.0);
  EXPECT_EQ(Iou(a, BoundingBox{100, 0, 200, 100}), 0.0);  // touching edge
  EXPECT_EQ(Iou(BoundingBox{5, 5, 5, 5}, BoundingBox{5, 5, 5, 5}), 0.0);
  EXPECT_EQ(Iou(a, BoundingBox{25, 25, 75, 75}), 0.25);
}

TEST(MatchObjectsTest, ClassAwareOptimalAssignment) {
  // pred0 overlaps both ground-truth males equally; the assignment gives it
  // to gt1 because pred1 fits gt0 far better. The female never competes.
  std::vector<ObjectInstance> gt = {Obj("male", BoundingBox{0, 0, 100, 100}),
                                    Obj("male", BoundingBox{0, 60, 100, 160}, {}, 1)};
  std::vector<ObjectInstance> pred = {Obj("male", BoundingBox{0, 30, 100, 130}),
                                      Obj("male", BoundingBox{0, 0, 100, 90}, {}, 1),
                                      Obj("female", BoundingBox{0, 60, 100, 160})};
  const Assignment a = MatchObjects(gt, pred, 0.3);
  ASSERT_EQ(a.pairs.size(), 2u);
  EXPECT_EQ(a.pairs[0].gt_index, 0u);
  EXPECT_EQ(a.pairs[0].pred_index, 1u);
  EXPECT_EQ(a.pairs[1].gt_index, 1u);
  EXPECT_EQ(a.pairs[1].pred_index, 0u);
  EXPECT_TRUE(a.unmatched_gt.empty());
  EXPECT_EQ(a.unmatched_pred, std::vector<std::size_t>{2});
}

TEST(MatchObjectsTest, ThresholdAppliedAfterSolving) {
  std::vector<ObjectInstance> gt = {Obj("knife", BoundingBox{0, 0, 100, 100})};
  std::vector<ObjectInstance> pred = {Obj("knife", BoundingBox{0, 50, 100, 150})};
  EXPECT_TRUE(MatchObjects(gt, pred, 0.5).pairs.empty());
  EXPECT_EQ(MatchObjects(gt, pred, 1.0 / 3.0).pairs.size(), 1u);
  // Exactly at the threshold counts.
  std::vector<ObjectInstance> half = {Obj("knife", BoundingBox{0, 0, 100, 50})};
  EXPECT_EQ(MatchObjects(gt, half, 0.5).pairs.size(), 1u);
}

TEST(MatchObjectsTest, BoxlessNeverMatch) {
  std::vector<ObjectInstance> gt = {Obj("gun", BoundingBox{0, 0, 10, 10})};
  std::vector<ObjectInstance> pred = {Obj("gun", std::nullopt)};
  const Assignment a = MatchObjects(gt, pred);
  EXPECT_TRUE(a.pairs.empty());
  EXPECT_EQ(a.unmatched_gt, std::vector<std::size_t>{0});
  EXPECT_EQ(a.unmatched_pred, std::vector<std::size_t>{0});
}

TEST(TallyObjectsTest, OnlySensitiveObjectsCount) {
  std::vector<ObjectInstance> gt = {
      Obj("male", BoundingBox{0, 0, 100, 100}, {"aggression"}),  // tp
      Obj("female", BoundingBox{200, 0, 300, 100}),             // matched, not counted
      Obj("knife", BoundingBox{500, 500, 600, 600}),            // fn
      Obj("child", BoundingBox{700, 0, 800, 100}),              // unmatched, not counted
      Obj("ufo", BoundingBox{900, 900, 950, 950}, {"bloody"})};  // out of vocabulary
  std::vector<ObjectInstance> pred = {
      Obj("male", BoundingBox{0, 0, 100, 100}),
      Obj("female", BoundingBox{200, 0, 300, 100}, {"nude"}),
      Obj("gun", BoundingBox{0, 500, 100, 600}),                 // fp
      Obj("bed", BoundingBox{0, 800, 100, 900})};               // not counted
  const Assignment a = MatchObjects(gt, pred);
  const ClassCounts c = TallyObjects(a, gt, pred, V());
  ExpectCounts(c, "male", 1, 0, 0);
  ExpectCounts(c, "female", 0, 0, 0);
  ExpectCounts(c, "knife", 0, 0, 1);
  ExpectCounts(c, "gun", 0, 1, 0);
  ExpectCounts(c, "child", 0, 0, 0);
  ExpectCounts(c, "bed", 0, 0, 0);
  EXPECT_EQ(c.Get("ufo").fn, 0);
  EXPECT_EQ(c.TotalTp(), 1);
  EXPECT_EQ(c.TotalFp(), 1);
  EXPECT_EQ(c.TotalFn(), 1);
}

TEST(MatchAttributesTest, OverMatchedAndUnmatched) {
  std::vector<ObjectInstance> gt = {
      Obj("male", BoundingBox{0, 0, 100, 100}, {"aggression", "bloody"}),
      Obj("female", BoundingBox{500, 500, 600, 600}, {"fear"})};
  std::vector<ObjectInstance> pred = {
      Obj("male", BoundingBox{0, 0, 100, 100}, {"aggression", "pain", "sparkly"}),
      Obj("child", BoundingBox{0, 500, 100, 600}, {"fear"})};
  const ClassCounts c = MatchAttributes(MatchObjects(gt, pred), gt, pred, V());
  ExpectCounts(c, "aggression", 1, 0, 0);
  ExpectCounts(c, "bloody", 0, 0, 1);
  ExpectCounts(c, "pain", 0, 1, 0);
  // The female is unmatched (fn) and the child's attribute is unmatched (fp).
  ExpectCounts(c, "fear", 0, 1, 1);
  EXPECT_EQ(c.Get("sparkly").fp, 0);
}

FrameRecord Frame(std::vector<ObjectInstance> objects, std::vector<Triplet> triplets) {
  FrameRecord f;
  f.objects = std::move(objects);
  f.triplets = std::move(triplets);
  return f;
}

TEST(MatchTripletsTest, EndpointsFollowAssignment) {
  // Prediction swaps identities but the boxes still line up, so the triplet
  // is judged by box correspondence, not by names.
  FrameRecord gt = Frame({Obj("male", BoundingBox{0, 0, 100, 100}),
                          Obj("male", BoundingBox{0, 500, 100, 600}, {}, 1)},
                         {{{"male", 0}, "hitting", {"male", 1}}});
  FrameRecord pred = Frame({Obj("male", BoundingBox{0, 500, 100, 600}),
                            Obj("male", BoundingBox{0, 0, 100, 100}, {}, 1)},
                           {{{"male", 1}, "hitting", {"male", 0}},
                            {{"male", 0}, "hitting", {"male", 1}}});
  const Assignment a = MatchObjects(gt.objects, pred.objects);
  const ClassCounts c = MatchTriplets(gt, pred, a, V());
  ExpectCounts(c, "hitting", 1, 1, 0);
}

TEST(MatchTripletsTest, SymmetricPredicatesMatchEitherOrientation) {
  FrameRecord gt = Frame({Obj("male", BoundingBox{0, 0, 100, 100}),
                          Obj("female", BoundingBox{0, 500, 100, 600})},
                         {{{"male", 0}, "kissing", {"female", 0}},
                          {{"male", 0}, "hitting", {"female", 0}}});
  FrameRecord pred = Frame(gt.objects, {{{"female", 0}, "kissing", {"male", 0}},
                                        {{"female", 0}, "hitting", {"male", 0}}});
  const ClassCounts c = MatchTriplets(gt, pred, MatchObjects(gt.objects, pred.objects), V());
  ExpectCounts(c, "kissing", 1, 0, 0);
  ExpectCounts(c, "hitting", 0, 1, 1);
}

TEST(MatchTripletsTest, GreedyConsumesOnce) {
  FrameRecord gt = Frame({Obj("female", BoundingBox{0, 0, 100, 100}),
                          Obj("cigarette", BoundingBox{0, 500, 100, 600})},
                         {{{"female", 0}, "smoking", {"cigarette", 0}}});
  FrameRecord pred = Frame(gt.objects, {{{"female", 0}, "smoking", {"cigarette", 0}},
                                        {{"female", 0}, "smoking", {"cigarette", 0}},
                                        {{"female", 0}, "dancing", {"cigarette", 0}}});
  const ClassCounts c = MatchTriplets(gt, pred, MatchObjects(gt.objects, pred.objects), V());
  ExpectCounts(c, "smoking", 1, 1, 0);
  EXPECT_EQ(c.Get("dancing").fp, 0);
}

TEST(MatchTripletsTest, UnmatchedEndpointsFail) {
  FrameRecord gt = Frame({Obj("male", BoundingBox{0, 0, 100, 100}),
                          Obj("knife", BoundingBox{0, 500, 100, 600})},
                         {{{"male", 0}, "holding", {"knife", 0}}});
  FrameRecord pred = Frame({Obj("male", BoundingBox{0, 0, 100, 100}),
                            Obj("knife", BoundingBox{900, 900, 950, 950})},
                           {{{"male", 0}, "holding", {"knife", 0}}});
  const ClassCounts c = MatchTriplets(gt, pred, MatchObjects(gt.objects, pred.objects), V());
  ExpectCounts(c, "holding", 0, 1, 1);
}

TEST(MatchTripletsTest, UngroundedFallsBackToNames) {
  FrameRecord gt = Frame({Obj("female", BoundingBox{0, 0, 100, 100}),
                          Obj("syringe", BoundingBox{0, 500, 100, 600})},
                         {{{"female", 0}, "injecting", {"syringe", 0}}});
  FrameRecord pred = Frame({Obj("female", std::nullopt), Obj("syringe", std::nullopt)},
                           {{{"female", 0}, "injecting", {"syringe", 0}}});
  const Assignment a = MatchObjects(gt.objects, pred.objects);
  EXPECT_TRUE(a.pairs.empty());
  ExpectCounts(MatchTriplets(gt, pred, a, V()), "injecting", 1, 0, 0);

  // One boxed object is enough to switch back to box correspondence.
  pred.objects[1].box = BoundingBox{900, 900, 950, 950};
  ExpectCounts(MatchTriplets(gt, pred, MatchObjects(gt.objects, pred.objects), V()),
               "injecting", 0, 1, 1);
}

TEST(MatchTagsTest, SetComparison) {
  const ClassCounts c = MatchTags({"gore", "violence"}, {"violence", "nudity"});
  ExpectCounts(c, "violence", 1, 0, 0);
  ExpectCounts(c, "gore", 0, 0, 1);
  ExpectCounts(c, "nudity", 0, 1, 0);
}

TEST(ClassCountsTest, MergeAndMergeFrame) {
  ClassCounts frame1;
  frame1.AddTp("gore");
  frame1.AddFn("gore");
  frame1.AddFp("nudity");
  ClassCounts frame2;
  frame2.AddTp("gore", 2);

  ClassCounts merged;
  merged.MergeFrame(frame1);
  merged.MergeFrame(frame2);
  const ClassTally gore = merged.Get("gore");
  EXPECT_EQ(gore.tp, 3);
  EXPECT_EQ(gore.fn, 1);
  EXPECT_EQ(gore.recall_frames, 2);
  EXPECT_EQ(gore.recall_sum, 1.5);
  EXPECT_EQ(gore.precision_frames, 2);
  EXPECT_EQ(gore.precision_sum, 2.0);
  const ClassTally nudity = merged.Get("nudity");
  EXPECT_EQ(nudity.recall_frames, 0);
  EXPECT_EQ(nudity.precision_frames, 1);
  EXPECT_EQ(nudity.precision_sum, 0.0);

  ClassCounts plain;
  plain.Merge(merged);
  plain.Merge(merged);
  EXPECT_EQ(plain.Get("gore").tp, 6);
  EXPECT_EQ(plain.Get("gore").recall_frames, 4);
  EXPECT_EQ(plain.Get("absent"), ClassTally{});
}

}  // namespace
}  // namespace sgmod
