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

// Training-loss kernels with analytic gradients with respect to the logits.
//
// Each kernel is a pure function returning the loss value and d(loss)/d(z).
// They are desk-scale references: no batching beyond what is stated, no
// autodiff, 64-bit reals throughout.

#ifndef SGMOD_LOSS_KERNELS_H_
#define SGMOD_LOSS_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgmod/matrix.h"

namespace sgmod {

inline constexpr double kDefaultLabelSmoothing = 0.05;
inline constexpr double kDefaultVarLambda = 0.1;
inline constexpr double kDefaultVarGamma = 2.0;
inline constexpr std::int64_t kDefaultVarWarmupSteps = 200;
inline constexpr double kScheduledSamplingMaxProb = 0.3;
inline constexpr std::int64_t kScheduledSamplingRampSteps = 500;
inline constexpr std::size_t kDefaultMaxPermutedElements = 5;

// Multi-task weights for downstream trainers; nothing here consumes them.
struct TaskWeights {
  double tags = 2.0;
  double predicates = 2.0;
  double objects = 1.5;
  double attributes = 1.5;
  double caption = 1.0;
};

// T x V logits and the T target ids they are scored against.
struct LogitsSequence {
  Matrix logits;
  std::vector<int> targets;
};

struct LossResult {
  double value = 0.0;
  Matrix gradient;  // same shape as the logits
};

// Throws InputError when T = 0, the target count differs from T, or a target
// id is outside [0, V).
void ValidateSequence(const LogitsSequence& seq);

// Softmax probabilities of each row.
Matrix Softmax(const Matrix& logits);

// Token-mean cross-entropy against targets smoothed toward uniform:
// (1 - eps) * -log p_target + (eps / V) * sum_v -log p_v.
LossResult SoftmaxCrossEntropy(const LogitsSequence& seq,
                               double label_smoothing = 0.0);

// CE + lambda * (1 - R_s)^gamma where R_s is the mean probability of the
// target token over `sensitive` positions. The penalty is 0 when `sensitive`
// is empty. Requires lambda >= 0 and gamma >= 1.
LossResult VarLoss(const LogitsSequence& seq,
                   std::span<const std::size_t> sensitive,
                   double lambda = kDefaultVarLambda,
                   double gamma = kDefaultVarGamma,
                   double label_smoothing = 0.0);

struct BatchLossResult {
  double value = 0.0;
  std::vector<Matrix> gradients;
};

// Batch form: CE averaged over every token in the batch, penalty computed per
// sequence and averaged over sequences.
BatchLossResult VarLossBatch(std::span<const LogitsSequence> batch,
                             std::span<const std::vector<std::size_t>> sensitive,
                             double lambda = kDefaultVarLambda,
                             double gamma = kDefaultVarGamma,
                             double label_smoothing = 0.0);

// Sensitive words and their subword tokenization.
class SensitiveTokenTable {
 public:
  // Every sensitive word must be present in `tokenization` with a non-empty
  // sequence of non-negative ids (InputError otherwise).
  SensitiveTokenTable(const std::map<std::string, std::vector<int>>& tokenization,
                      const std::vector<std::string>& sensitive_words);

  // {"tokenizer": {word: [ids]}, "sensitive_words": [word, ...]}
  static SensitiveTokenTable FromJson(std::string_view text,
                                      std::string_view origin);

  // Distinct token sequences of the sensitive words.
  const std::vector<std::vector<int>>& sequences() const { return sequences_; }
  bool IsFirstToken(int id) const;
  // Indices into sequences() whose first token is `id`.
  std::span<const std::size_t> CandidatesFor(int id) const;

 private:
  std::vector<std::vector<int>> sequences_;
  // Dense id -> offset into candidate_lists_, -1 when not a first token.
  std::vector<int> first_token_slot_;
  std::vector<std::vector<std::size_t>> candidate_lists_;
};

// Sorted positions covered by a full match of some sensitive word. Candidate
// starts are screened by first token before the full sequence is compared.
std::vector<std::size_t> SensitivePositions(std::span<const int> targets,
                                            const SensitiveTokenTable& table);

// Maps a target token sequence to teacher-forced logits for it.
using SequenceEvaluator = std::function<Matrix(std::span<const int>)>;

// Concatenates elements in `order`, inserting `joiner` between neighbours.
std::vector<int> JoinElements(const std::vector<std::vector<int>>& elements,
                              std::span<const std::size_t> order,
                              std::span<const int> joiner);

struct MinPermutationResult {
  double value = 0.0;
  std::vector<std::size_t> permutation;  // element order that achieved `value`
  std::size_t evaluated = 0;             // orderings scored
};

// Minimum cross-entropy over every ordering of `elements` when there are at
// most `k_max` of them, else the CE of the given order. Every position of the
// joined sequence, separators included, is scored. Ties keep the
// lexicographically smallest permutation. The evaluator is only called from
// the invoking thread.
MinPermutationResult MinPermutationCrossEntropy(
    const SequenceEvaluator& evaluator,
    const std::vector<std::vector<int>>& elements, std::span<const int> joiner,
    std::size_t k_max = kDefaultMaxPermutedElements,
    double label_smoothing = 0.0);

struct AslConfig {
  double gamma_pos = 0.0;
  double gamma_neg = 0.0;
  double margin = 0.0;
};

inline constexpr AslConfig kAslBalanced{1.0, 4.0, 0.0};
inline constexpr AslConfig kAslAggressive{0.0, 7.0, 0.0};

// -sum_c [y_c (1-p)^g+ log p + (1-y_c) p_m^g- log(1-p_m)], p = sigmoid(z),
// p_m = max(p - m, 0). Gradient is returned as a 1 x C matrix.
LossResult AsymmetricLoss(std::span<const double> logits,
                          std::span<const int> labels, const AslConfig& config);

// kScheduledSamplingMaxProb * min(step / ramp, 1).
double ScheduledSamplingProb(std::int64_t step,
                             double max_prob = kScheduledSamplingMaxProb,
                             std::int64_t ramp_steps = kScheduledSamplingRampSteps);

// lambda * min(step / warmup, 1).
double VarWarmupLambda(std::int64_t step, double lambda = kDefaultVarLambda,
                       std::int64_t warmup_steps = kDefaultVarWarmupSteps);

}  // namespace sgmod

#endif  // SGMOD_LOSS_KERNELS_H_
