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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmod/bias_audit.h"
#include "sgmod/evaluator.h"
#include "sgmod/hungarian.h"
#include "sgmod/loss_kernels.h"
#include "sgmod/losscheck.h"
#include "sgmod/metrics.h"
#include "sgmod/parser.h"
#include "sgmod/report_io.h"
#include "sgmod/vocabulary.h"
#include "testing/synthetic.h"

namespace sgmod {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

const fs::path kData = fs::path(SGMOD_DATA_DIR);
const fs::path kFixture = fs::path(SGMOD_TEST_DATA_DIR) / "fixture20";

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

const Vocabulary& Vocab() {
  static const Vocabulary vocab = LoadVocabulary(kData / "vocabulary.json");
  return vocab;
}

std::map<std::string, FrameRecord> AsPredictions(const std::vector<FrameRecord>& frames) {
  std::map<std::string, FrameRecord> out;
  for (const auto& f : frames) out.emplace(f.frame_id, f);
  return out;
}

// 1. Assignment solver against exhaustive search.
Outcome HungarianAgainstBruteForce() {
  std::mt19937_64 rng(101);
  const auto start = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
    Matrix cost(n, m);
    const bool integral = trial % 2 == 0;
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double& c : cost.data()) {
      c = integral ? static_cast<double>(rng() % 8) : u(rng);
    }
    // Exhaustive: permute the larger side, pair with the smaller.
    const std::size_t k = std::min(n, m);
    std::vector<std::size_t> perm(std::max(n, m));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> col_of(n);
    do {
      // Summed in row order, as the solver's pairs are.
      double s = 0.0;
      if (n <= m) {
        for (std::size_t i = 0; i < k; ++i) s += cost(i, perm[i]);
      } else {
        std::fill(col_of.begin(), col_of.end(), m);
        for (std::size_t i = 0; i < k; ++i) col_of[perm[i]] = i;
        for (std::size_t r = 0; r < n; ++r) {
          if (col_of[r] < m) s += cost(r, col_of[r]);
        }
      }
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    const auto pairs = HungarianSolve(cost);
    std::set<std::size_t> rows, cols;
    double got = 0.0;
    for (const auto& [r, c] : pairs) {
      rows.insert(r);
      cols.insert(c);
      got += cost(r, c);
    }
    const bool ok = pairs.size() == k && rows.size() == k && cols.size() == k &&
                    got == best && AssignmentCost(cost, pairs) == best;
    if (!ok) ++mismatches;
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && secs < 5.0,
          Fmt("1000 matrices, %.0f mismatches, %.2f s", mismatches, secs)};
}

// 2. Predictions identical to ground truth score perfectly.
Outcome SelfEvaluationIsPerfect() {
  const auto corpus = testing::SyntheticCorpus(2000, testing::kDefaultSeed, Vocab());
  const auto preds = AsPredictions(corpus);
  const auto start = Clock::now();
  EvaluationOptions options;
  options.workers = 1;
  const EvaluationTotals totals = Evaluate(corpus, preds, Vocab(), options);
  const EvaluationReport r = BuildReport(totals, Vocab(), {});
  const double secs = Seconds(start);
  bool all_one = r.r_sb == 1.0 && r.p_sb == 1.0 && r.f1_sb == 1.0 &&
                 r.tag_f1_macro == 1.0 && r.safety_f1 == 1.0 && !r.flagged();
  for (const auto& c : r.per_category) {
    for (Component comp : kAllComponents) all_one = all_one && c.r(comp) == 1.0 && c.p(comp) == 1.0;
  }
  return {all_one && secs < 10.0, Fmt("R_SB %.17g, F1_SB %.17g, %.2f s", r.r_sb, r.f1_sb, secs)};
}

EvaluationReport ScoreFixture(std::vector<FrameRecord> gt, PredictionSet preds,
                              const EmbeddingSidecar* embeddings) {
  EvaluationOptions options;
  options.embeddings = embeddings;
  EvaluationTotals totals = Evaluate(gt, preds.frames, Vocab(), options);
  totals.parse_failures = static_cast<std::int64_t>(preds.failures.size());
  ReportOptions ro;
  ro.name = "fixture20";
  if (embeddings) ro.embedding_model = embeddings->model;
  return BuildReport(totals, Vocab(), ro);
}

PredictionSet FixturePredictions() {
  std::ifstream in(kFixture / "pred.jsonl");
  return ReadPredictions(in, Vocab());
}

// Numbers agree within `tol`; everything else must be equal.
void CompareJson(const json& a, const json& b, double tol, const std::string& path,
                 double& worst, int& mismatches) {
  if (a.is_number() && b.is_number()) {
    const double d = std::abs(a.get<double>() - b.get<double>());
    worst = std::max(worst, d);
    if (d > tol) ++mismatches;
    return;
  }
  if (a.type() != b.type()) {
    ++mismatches;
    return;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) ++mismatches;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        ++mismatches;
        continue;
      }
      CompareJson(it.value(), b.at(it.key()), tol, path + "." + it.key(), worst, mismatches);
    }
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      ++mismatches;
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      CompareJson(a[i], b[i], tol, path + "[" + std::to_string(i) + "]", worst, mismatches);
    }
  } else if (a != b) {
    ++mismatches;
  }
}

// 3. Fixture report agrees with the independently computed golden report.
Outcome FixtureMatchesGolden() {
  const auto embeddings = LoadEmbeddings(kFixture / "embeddings.json");
  const EvaluationReport got = ScoreFixture(ParseGroundTruthFile(kFixture / "gt.jsonl", Vocab()),
                                            FixturePredictions(), &embeddings);
  const EvaluationReport want = LoadReport(kFixture / "expected_report.json");
  double worst = 0.0;
  int mismatches = 0;
  CompareJson(ReportToJson(got), ReportToJson(want), 1e-12, "", worst, mismatches);
  return {mismatches == 0,
          Fmt("%.0f mismatching fields, max abs diff %.3g, R_SB %.16f", mismatches, worst,
              got.r_sb)};
}

// 4. Repeating one category's frames leaves the category-balanced recall alone.
Outcome DuplicationInvariance() {
  auto gt = ParseGroundTruthFile(kFixture / "gt.jsonl", Vocab());
  PredictionSet preds = FixturePredictions();
  const double base = ScoreFixture(gt, preds, nullptr).r_sb;
  std::vector<FrameRecord> extra;
  int duplicated = 0;
  for (const auto& frame : gt) {
    if (frame.frame_id.empty() || frame.frame_id[0] != 'v') continue;
    ++duplicated;
    for (int k = 1; k <= 5; ++k) {
      const std::string id = frame.frame_id + "_dup" + std::to_string(k);
      FrameRecord copy = frame;
      copy.frame_id = id;
      extra.push_back(copy);
      if (auto it = preds.frames.find(frame.frame_id); it != preds.frames.end()) {
        FrameRecord p = it->second;
        p.frame_id = id;
        preds.frames.emplace(id, p);
      }
    }
  }
  gt.insert(gt.end(), extra.begin(), extra.end());
  const double dup = ScoreFixture(gt, preds, nullptr).r_sb;
  const double diff = std::abs(dup - base);
  return {duplicated > 0 && diff < 1e-12,
          Fmt("%.0f violence frames x5, R_SB %.16f -> %.16f", duplicated, base, dup)};
}

// Central differences with a fixed step.
Matrix CentralDifference(const std::function<double(const Matrix&)>& f, Matrix x) {
  const double h = 1e-5;
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double orig = x.data()[i];
    x.data()[i] = orig + h;
    const double up = f(x);
    x.data()[i] = orig - h;
    const double down = f(x);
    x.data()[i] = orig;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

double MaxRelativeGap(const Matrix& a, const Matrix& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    diff = std::max(diff, std::abs(a.data()[i] - b.data()[i]));
    scale = std::max({scale, std::abs(a.data()[i]), std::abs(b.data()[i])});
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

// 5. Analytic gradients against finite differences.
Outcome GradientsMatch() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal(0.0, 1.5);
  double worst_ce = 0, worst_var = 0, worst_asl = 0;
  bool var_reduces = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t t = 2 + rng() % 6, v = 2 + rng() % 8;
    LogitsSequence seq{Matrix(t, v), std::vector<int>(t)};
    for (double& z : seq.logits.data()) z = normal(rng);
    for (int& y : seq.targets) y = static_cast<int>(rng() % v);
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < t; ++i) {
      if (rng() % 2) s.push_back(i);
    }
    if (s.empty()) s.push_back(0);
    const double eps = kDefaultLabelSmoothing;

    const auto ce = SoftmaxCrossEntropy(seq, eps);
    worst_ce = std::max(worst_ce, MaxRelativeGap(ce.gradient, CentralDifference(
        [&](const Matrix& z) { return SoftmaxCrossEntropy({z, seq.targets}, eps).value; },
        seq.logits)));

    const auto var = VarLoss(seq, s, 0.1, 2.0, eps);
    worst_var = std::max(worst_var, MaxRelativeGap(var.gradient, CentralDifference(
        [&](const Matrix& z) { return VarLoss({z, seq.targets}, s, 0.1, 2.0, eps).value; },
        seq.logits)));

    const auto var0 = VarLoss(seq, s, 0.0, 2.0, eps);
    var_reduces = var_reduces && var0.value == ce.value && var0.gradient == ce.gradient;

    for (const AslConfig& config : {kAslBalanced, kAslAggressive}) {
      const std::size_t c = 2 + rng() % 12;
      Matrix z(1, c);
      std::vector<int> y(c);
      for (std::size_t k = 0; k < c; ++k) {
        z(0, k) = normal(rng) * 2;
        y[k] = rng() % 3 == 0 ? 1 : 0;
      }
      const auto asl = AsymmetricLoss(z.data(), y, config);
      worst_asl = std::max(worst_asl, MaxRelativeGap(asl.gradient, CentralDifference(
          [&](const Matrix& m) { return AsymmetricLoss(m.data(), y, config).value; }, z)));
    }
  }
  const double tol = 1e-6;
  return {worst_ce < tol && worst_var < tol && worst_asl < tol && var_reduces,
          Fmt("max rel err CE %.2e, VAR %.2e, ASL %.2e", worst_ce, worst_var, worst_asl) +
              (var_reduces ? ", VAR(lambda=0) == CE" : ", VAR(lambda=0) != CE")};
}

// 6. Permutation-minimised CE against an exhaustive search.
Outcome MinPermutationMatchesExhaustive() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> normal(0.0, 2.0);
  int mismatches = 0, above_original = 0;
  double worst_hand = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t vsize = 8;
    Matrix w(vsize, vsize);
    for (double& x : w.data()) x = normal(rng);
    const auto eval = BigramEvaluator(w, 0);
    std::vector<std::vector<int>> elements(1 + trial % 5);
    for (auto& e : elements) {
      e.resize(1 + rng() % 3);
      for (int& id : e) id = 1 + static_cast<int>(rng() % (vsize - 1));
    }
    const std::vector<int> joiner = trial % 2 ? std::vector<int>{0} : std::vector<int>{};

    std::vector<std::size_t> order(elements.size());
    std::iota(order.begin(), order.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    double original = 0.0;
    bool first = true;
    do {
      std::vector<int> targets;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) targets.insert(targets.end(), joiner.begin(), joiner.end());
        targets.insert(targets.end(), elements[order[i]].begin(), elements[order[i]].end());
      }
      // Token-mean CE, also written out directly as a cross-check.
      const Matrix logits = eval(targets);
      double sum = 0.0;
      for (std::size_t r = 0; r < targets.size(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < vsize; ++c) mx = std::max(mx, logits(r, c));
        double z = 0.0;
        for (std::size_t c = 0; c < vsize; ++c) z += std::exp(logits(r, c) - mx);
        sum += mx + std::log(z) - logits(r, static_cast<std::size_t>(targets[r]));
      }
      const double hand = sum / static_cast<double>(targets.size());
      const double ce = SoftmaxCrossEntropy({logits, targets}).value;
      worst_hand = std::max(worst_hand, std::abs(ce - hand) / std::max(1.0, hand));
      if (first) original = ce;
      first = false;
      best = std::min(best, ce);
    } while (std::next_permutation(order.begin(), order.end()));

    const auto got = MinPermutationCrossEntropy(eval, elements, joiner);
    if (got.value != best) ++mismatches;
    if (!(got.value <= original)) ++above_original;
  }
  return {mismatches == 0 && above_original == 0 && worst_hand < 1e-12,
          Fmt("100 instances, %.0f differ from exhaustive, %.0f above original order, "
              "CE cross-check gap %.1e",
              mismatches, above_original, worst_hand)};
}

// 7. Screened sensitive-token scan against the unscreened scan, and its speed.
Outcome SensitiveScanCorrectAndFast() {
  std::mt19937_64 rng(404);
  const int vocab_size = 5000;
  std::map<std::string, std::vector<int>> tokenizer;
  std::vector<std::string> words;
  for (int w = 0; w < 120; ++w) {
    std::vector<int> ids(1 + rng() % 4);
    for (int& id : ids) id = static_cast<int>(rng() % vocab_size);
    const std::string name = "w" + std::to_string(w);
    tokenizer[name] = ids;
    words.push_back(name);
  }
  const SensitiveTokenTable table(tokenizer, words);
  const auto& seqs = table.sequences();

  auto random_stream = [&](std::size_t length) {
    std::vector<int> s;
    while (s.size() < length) {
      if (rng() % 10 == 0) {
        const auto& word = seqs[rng() % seqs.size()];
        s.insert(s.end(), word.begin(), word.end());
      } else {
        s.push_back(static_cast<int>(rng() % vocab_size));
      }
    }
    s.resize(length);
    return s;
  };

  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_stream(rng() % 200);
    // Brute force written out here: every word at every offset.
    std::vector<char> covered(s.size(), 0);
    for (std::size_t t = 0; t < s.size(); ++t) {
      for (const auto& word : seqs) {
        if (t + word.size() <= s.size() &&
            std::equal(word.begin(), word.end(), s.begin() + static_cast<std::ptrdiff_t>(t))) {
          std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(t), word.size(), 1);
        }
      }
    }
    std::vector<std::size_t> want;
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (covered[t]) want.push_back(t);
    }
    if (SensitivePositions(s, table) != want) ++mismatches;
  }

  const auto stream = random_stream(20000);
  auto best_time = [&](const std::function<std::vector<std::size_t>()>& f) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t sink = 0;
    for (int rep = 0; rep < 15; ++rep) {
      const auto start = Clock::now();
      sink += f().size();
      best = std::min(best, Seconds(start));
    }
    return sink > 0 ? best : best;
  };
  const double screened = best_time([&] { return SensitivePositions(stream, table); });
  const double exhaustive = best_time([&] { return SensitivePositionsExhaustive(stream, table); });
  const double speedup = exhaustive / std::max(screened, 1e-9);
  return {mismatches == 0 && speedup >= 5.0,
          Fmt("1000 streams, %.0f mismatches; %.0f words, length 20000, speedup %.1fx",
              mismatches, static_cast<double>(seqs.size()), speedup)};
}

// 8. The prediction parser is total, and clean graphs survive a round trip.
Outcome ParserTotalAndRoundTrips() {
  std::mt19937_64 rng(505);
  const char* alphabet = "{}[]\",:<>_loc0123456789 abcxyz\n\\";
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::string payload(rng() % 120, '\0');
    for (char& c : payload) {
      c = trial % 2 ? static_cast<char>(rng() % 256) : alphabet[rng() % 33];
    }
    const auto hint = static_cast<PredictionFormat>(trial % 4);
    try {
      const ParseOutcome out = ParsePrediction({"f", payload, hint}, Vocab());
      if (out.graph.frame_id != "f") ++violations;
      if (out.recovered < 0) ++violations;
    } catch (...) {
      ++violations;
    }
  }
  int round_trip_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const FrameRecord frame = testing::RandomCleanFrame(rng, Vocab(), "rt" + std::to_string(i));
    const std::string line = SerializeGraph(frame, Vocab());
    const FrameRecord back = ParseGroundTruthLine(line, Vocab(), 1);
    const ParseOutcome lenient = ParsePrediction({frame.frame_id, line}, Vocab());
    const bool same = back == frame && SerializeGraph(back, Vocab()) == line &&
                      lenient.dropped.empty() && lenient.graph.tags == frame.tags &&
                      lenient.graph.objects == frame.objects &&
                      lenient.graph.triplets == frame.triplets &&
                      lenient.graph.caption == frame.caption;
    if (!same) ++round_trip_failures;
  }
  return {violations == 0 && round_trip_failures == 0,
          Fmt("10000 random payloads, %.0f violations; 1000 round trips, %.0f failures",
              violations, round_trip_failures)};
}

// 9. Bias statistics identities.
Outcome BiasStatisticsIdentities() {
  const std::vector<double> split = {2521, 438};
  const double hhi = Hhi(split);
  const double expected = (2521.0 * 2521 + 438.0 * 438) / (2959.0 * 2959);
  bool ok = std::abs(hhi - expected) < 1e-15 && std::abs(hhi - 0.7478) < 1e-4;
  for (int k = 1; k <= 50; ++k) {
    const std::vector<double> uniform(static_cast<std::size_t>(k), 7.0);
    ok = ok && std::abs(Hhi(uniform) - 1.0 / k) < 1e-15;
  }

  std::mt19937_64 rng(606);
  double worst_sym = 0.0, worst_anti = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    std::vector<std::string> rows, cols;
    for (std::size_t i = 0; i < r; ++i) rows.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < c; ++j) cols.push_back("c" + std::to_string(j));
    CooccurrenceTable table(rows, cols);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) table.Set(i, j, static_cast<double>(rng() % 6));
    }
    if (table.Total() == 0) table.Set(0, 0, 1.0);
    const CellMatrix a = Npmi(table);
    const CellMatrix b = Npmi(table.Transposed());
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        if (a[i][j].has_value() != b[j][i].has_value()) {
          ok = false;
        } else if (a[i][j]) {
          worst_sym = std::max(worst_sym, std::abs(*a[i][j] - *b[j][i]));
        }
      }
    }
    std::map<std::string, double> ca, cb;
    for (int key = 0; key < 6; ++key) {
      if (rng() % 3) ca["t" + std::to_string(key)] = static_cast<double>(rng() % 50);
      if (rng() % 3) cb["t" + std::to_string(key)] = static_cast<double>(rng() % 50);
    }
    const double ta = 100 + static_cast<double>(rng() % 100);
    const double tb = 100 + static_cast<double>(rng() % 100);
    const auto ab = LogOdds(ca, ta, cb, tb);
    const auto ba = LogOdds(cb, tb, ca, ta);
    if (ab.size() != ba.size()) ok = false;
    for (const auto& [key, value] : ab) {
      if (!ba.contains(key)) {
        ok = false;
        continue;
      }
      worst_anti = std::max(worst_anti, std::abs(value + ba.at(key)));
    }
  }
  ok = ok && worst_sym < 1e-12 && worst_anti < 1e-12;
  return {ok, Fmt("HHI(2521, 438) = %.4f; nPMI transpose gap %.1e; log-odds antisymmetry gap %.1e",
                  hhi, worst_sym, worst_anti)};
}

// 10. Schedule endpoints are exact.
Outcome ScheduleEndpoints() {
  const bool ok = ScheduledSamplingProb(0) == 0.0 &&
                  ScheduledSamplingProb(kScheduledSamplingRampSteps) == kScheduledSamplingMaxProb &&
                  ScheduledSamplingProb(10 * kScheduledSamplingRampSteps) == kScheduledSamplingMaxProb &&
                  VarWarmupLambda(0) == 0.0 &&
                  VarWarmupLambda(kDefaultVarWarmupSteps) == kDefaultVarLambda &&
                  VarWarmupLambda(10 * kDefaultVarWarmupSteps) == kDefaultVarLambda &&
                  ScheduledSamplingProb(kScheduledSamplingRampSteps - 1) < kScheduledSamplingMaxProb &&
                  VarWarmupLambda(kDefaultVarWarmupSteps - 1) < kDefaultVarLambda;
  return {ok, Fmt("p(0) = %g, p(500) = %g, lambda(200) = %g", ScheduledSamplingProb(0),
                  ScheduledSamplingProb(500), VarWarmupLambda(200))};
}

}  // namespace
}  // namespace sgmod

int main() {
  using sgmod::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"assignment solver matches brute force", sgmod::HungarianAgainstBruteForce},
      {"self-evaluation scores exactly 1", sgmod::SelfEvaluationIsPerfect},
      {"fixture report matches golden", sgmod::FixtureMatchesGolden},
      {"category duplication leaves R_SB unchanged", sgmod::DuplicationInvariance},
      {"loss gradients match finite differences", sgmod::GradientsMatch},
      {"min-permutation CE matches exhaustive", sgmod::MinPermutationMatchesExhaustive},
      {"first-token screen is exact and fast", sgmod::SensitiveScanCorrectAndFast},
      {"prediction parser is total and round-trips", sgmod::ParserTotalAndRoundTrips},
      {"bias statistics identities", sgmod::BiasStatisticsIdentities},
      {"schedule endpoints are exact", sgmod::ScheduleEndpoints},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome{false, ""};
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                outcome.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
