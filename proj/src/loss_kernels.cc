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

#include "sgmod/loss_kernels.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

// Row-wise log-sum-exp.
std::vector<double> LogSumExp(const Matrix& logits) {
  std::vector<double> out(logits.rows());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto row = logits.row(t);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double z : row) sum += std::exp(z - m);
    out[t] = m + std::log(sum);
  }
  return out;
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Adds scale * d[lambda (1 - R_s)^gamma]/dz to `grad` and returns the
// penalty value.
double AddRecallPenalty(const LogitsSequence& seq, const Matrix& probs,
                        std::span<const std::size_t> sensitive, double lambda,
                        double gamma, double scale, Matrix& grad) {
  if (lambda < 0.0) throw InputError("VAR lambda must be >= 0");
  if (gamma < 1.0) throw InputError("VAR gamma must be >= 1");
  std::set<std::size_t> positions(sensitive.begin(), sensitive.end());
  if (positions.empty()) return 0.0;
  if (*positions.rbegin() >= seq.targets.size()) {
    throw InputError("sensitive position outside the target sequence");
  }
  double r = 0.0;
  for (std::size_t i : positions) r += probs(i, static_cast<std::size_t>(seq.targets[i]));
  const double n = static_cast<double>(positions.size());
  r /= n;
  const double value = lambda * std::pow(1.0 - r, gamma);
  const double coef = -lambda * gamma * std::pow(1.0 - r, gamma - 1.0) / n * scale;
  for (std::size_t i : positions) {
    const std::size_t target = static_cast<std::size_t>(seq.targets[i]);
    const double pt = probs(i, target);
    for (std::size_t v = 0; v < probs.cols(); ++v) {
      const double dp = pt * ((v == target ? 1.0 : 0.0) - probs(i, v));
      grad(i, v) += coef * dp;
    }
  }
  return value;
}

}  // namespace

void ValidateSequence(const LogitsSequence& seq) {
  if (seq.logits.rows() == 0 || seq.logits.cols() == 0) {
    throw InputError("logits must have at least one row and one column");
  }
  if (seq.targets.size() != seq.logits.rows()) {
    throw InputError("target count " + std::to_string(seq.targets.size()) +
                     " does not match logits rows " +
                     std::to_string(seq.logits.rows()));
  }
  for (int id : seq.targets) {
    if (id < 0 || static_cast<std::size_t>(id) >= seq.logits.cols()) {
      throw InputError("target id " + std::to_string(id) +
                       " outside vocabulary of size " +
                       std::to_string(seq.logits.cols()));
    }
  }
}

Matrix Softmax(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  if (logits.cols() == 0) return probs;
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const auto row = logits.row(t);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (std::size_t v = 0; v < logits.cols(); ++v) {
      probs(t, v) = std::exp(row[v] - mx);
      sum += probs(t, v);
    }
    for (std::size_t v = 0; v < logits.cols(); ++v) probs(t, v) /= sum;
  }
  return probs;
}

LossResult SoftmaxCrossEntropy(const LogitsSequence& seq, double label_smoothing) {
  ValidateSequence(seq);
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
    throw InputError("label smoothing must be in [0, 1)");
  }
  const std::size_t T = seq.logits.rows();
  const std::size_t V = seq.logits.cols();
  const double eps = label_smoothing;
  const double inv_t = 1.0 / static_cast<double>(T);
  const std::vector<double> lse = LogSumExp(seq.logits);

  LossResult result;
  result.gradient = Matrix(T, V);
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t target = static_cast<std::size_t>(seq.targets[t]);
    double nll_sum = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      const double log_p = seq.logits(t, v) - lse[t];
      nll_sum -= log_p;
      double g = std::exp(log_p) - eps / static_cast<double>(V);
      if (v == target) g -= 1.0 - eps;
      result.gradient(t, v) = g * inv_t;
    }
    const double nll_target = lse[t] - seq.logits(t, target);
    total += (1.0 - eps) * nll_target + eps / static_cast<double>(V) * nll_sum;
  }
  result.value = total * inv_t;
  return result;
}

LossResult VarLoss(const LogitsSequence& seq, std::span<const std::size_t> sensitive,
                   double lambda, double gamma, double label_smoothing) {
  LossResult result = SoftmaxCrossEntropy(seq, label_smoothing);
  if (lambda == 0.0 || sensitive.empty()) {
    if (lambda < 0.0) throw InputError("VAR lambda must be >= 0");
    if (gamma < 1.0) throw InputError("VAR gamma must be >= 1");
    return result;
  }
  const Matrix probs = Softmax(seq.logits);
  result.value += AddRecallPenalty(seq, probs, sensitive, lambda, gamma, 1.0,
                                   result.gradient);
  return result;
}

BatchLossResult VarLossBatch(std::span<const LogitsSequence> batch,
                             std::span<const std::vector<std::size_t>> sensitive,
                             double lambda, double gamma, double label_smoothing) {
  if (batch.empty()) throw InputError("empty batch");
  if (sensitive.size() != batch.size()) {
    throw InputError("one sensitive-position set is needed per sequence");
  }
  std::size_t tokens = 0;
  for (const auto& seq : batch) tokens += seq.targets.size();
  const double inv_tokens = 1.0 / static_cast<double>(tokens);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  BatchLossResult result;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    LossResult ce = SoftmaxCrossEntropy(batch[b], label_smoothing);
    const double weight = static_cast<double>(batch[b].targets.size()) * inv_tokens;
    result.value += ce.value * weight;
    for (double& g : ce.gradient.data()) g *= weight;
    if (lambda != 0.0 && !sensitive[b].empty()) {
      const Matrix probs = Softmax(batch[b].logits);
      result.value += inv_batch * AddRecallPenalty(batch[b], probs, sensitive[b],
                                                   lambda, gamma, inv_batch,
                                                   ce.gradient);
    }
    result.gradients.push_back(std::move(ce.gradient));
  }
  return result;
}

SensitiveTokenTable::SensitiveTokenTable(
    const std::map<std::string, std::vector<int>>& tokenization,
    const std::vector<std::string>& sensitive_words) {
  std::set<std::vector<int>> distinct;
  for (const auto& word : sensitive_words) {
    auto it = tokenization.find(word);
    if (it == tokenization.end()) {
      throw InputError("sensitive word '" + word + "' has no tokenization");
    }
    if (it->second.empty()) {
      throw InputError("sensitive word '" + word + "' tokenizes to nothing");
    }
    for (int id : it->second) {
      if (id < 0) throw InputError("token ids must be non-negative");
    }
    distinct.insert(it->second);
  }
  sequences_.assign(distinct.begin(), distinct.end());
  int max_first = -1;
  for (const auto& seq : sequences_) max_first = std::max(max_first, seq.front());
  first_token_slot_.assign(static_cast<std::size_t>(max_first + 1), -1);
  for (std::size_t i = 0; i < sequences_.size(); ++i) {
    int& slot = first_token_slot_[static_cast<std::size_t>(sequences_[i].front())];
    if (slot < 0) {
      slot = static_cast<int>(candidate_lists_.size());
      candidate_lists_.emplace_back();
    }
    candidate_lists_[static_cast<std::size_t>(slot)].push_back(i);
  }
}

SensitiveTokenTable SensitiveTokenTable::FromJson(std::string_view text,
                                                  std::string_view origin) {
  using nlohmann::json;
  const std::string where(origin);
  json root = json::parse(text.begin(), text.end(), nullptr, false);
  if (!root.is_object() || !root.contains("tokenizer") ||
      !root["tokenizer"].is_object() || !root.contains("sensitive_words") ||
      !root["sensitive_words"].is_array()) {
    throw InputError(where + ": token table needs 'tokenizer' and 'sensitive_words'");
  }
  std::map<std::string, std::vector<int>> tokenization;
  for (const auto& [word, ids] : root["tokenizer"].items()) {
    if (!ids.is_array()) throw InputError(where + ": tokenization of '" + word + "' must be a list");
    std::vector<int> seq;
    for (const auto& id : ids) {
      if (!id.is_number_integer()) {
        throw InputError(where + ": tokenization of '" + word + "' must hold integers");
      }
      seq.push_back(id.get<int>());
    }
    tokenization.emplace(word, std::move(seq));
  }
  std::vector<std::string> words;
  for (const auto& w : root["sensitive_words"]) {
    if (!w.is_string()) throw InputError(where + ": sensitive_words must be strings");
    words.push_back(w.get<std::string>());
  }
  try {
    return SensitiveTokenTable(tokenization, words);
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

bool SensitiveTokenTable::IsFirstToken(int id) const {
  return id >= 0 && static_cast<std::size_t>(id) < first_token_slot_.size() &&
         first_token_slot_[static_cast<std::size_t>(id)] >= 0;
}

std::span<const std::size_t> SensitiveTokenTable::CandidatesFor(int id) const {
  if (!IsFirstToken(id)) return {};
  return candidate_lists_[static_cast<std::size_t>(
      first_token_slot_[static_cast<std::size_t>(id)])];
}

std::vector<std::size_t> SensitivePositions(std::span<const int> targets,
                                            const SensitiveTokenTable& table) {
  std::vector<char> covered(targets.size(), 0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (std::size_t index : table.CandidatesFor(targets[t])) {
      const auto& seq = table.sequences()[index];
      if (t + seq.size() > targets.size()) continue;
      if (std::equal(seq.begin(), seq.end(), targets.begin() + static_cast<std::ptrdiff_t>(t))) {
        std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(t), seq.size(), 1);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < covered.size(); ++t) {
    if (covered[t]) out.push_back(t);
  }
  return out;
}

std::vector<int> JoinElements(const std::vector<std::vector<int>>& elements,
                              std::span<const std::size_t> order,
                              std::span<const int> joiner) {
  std::vector<int> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) out.insert(out.end(), joiner.begin(), joiner.end());
    const auto& e = elements.at(order[i]);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

MinPermutationResult MinPermutationCrossEntropy(
    const SequenceEvaluator& evaluator,
    const std::vector<std::vector<int>>& elements, std::span<const int> joiner,
    std::size_t k_max, double label_smoothing) {
  if (elements.empty()) throw InputError("MinPermutationCE needs at least one element");
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), 0);

  auto score = [&](const std::vector<std::size_t>& perm) {
    LogitsSequence seq;
    seq.targets = JoinElements(elements, perm, joiner);
    seq.logits = evaluator(seq.targets);
    return SoftmaxCrossEntropy(seq, label_smoothing).value;
  };

  MinPermutationResult best;
  best.permutation = order;
  best.value = score(order);
  best.evaluated = 1;
  if (elements.size() > k_max) return best;
  while (std::next_permutation(order.begin(), order.end())) {
    const double value = score(order);
    ++best.evaluated;
    if (value < best.value) {
      best.value = value;
      best.permutation = order;
    }
  }
  return best;
}

LossResult AsymmetricLoss(std::span<const double> logits, std::span<const int> labels,
                          const AslConfig& config) {
  if (logits.size() != labels.size()) {
    throw InputError("ASL needs one label per logit");
  }
  if (config.gamma_pos < 0.0 || config.gamma_neg < 0.0 || config.margin < 0.0) {
    throw InputError("ASL exponents and margin must be >= 0");
  }
  LossResult result;
  result.gradient = Matrix(1, logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const double x = logits[c];
    const double p = Sigmoid(x);
    const double one_minus_p = Sigmoid(-x);
    if (labels[c] != 0) {
      const double g = config.gamma_pos;
      const double log_p = -Softplus(-x);
      const double focus = std::pow(one_minus_p, g);
      result.value -= focus * log_p;
      result.gradient(0, c) = focus * (g * p * log_p - one_minus_p);
    } else {
      const double g = config.gamma_neg;
      const double m = config.margin;
      const double q = p - m;
      if (q <= 0.0) continue;
      const double one_minus_q = one_minus_p + m;
      const double log_one_minus_q = m == 0.0 ? -Softplus(x) : std::log(one_minus_q);
      const double qg = std::pow(q, g);
      result.value -= qg * log_one_minus_q;
      const double ratio = m == 0.0 ? 1.0 : one_minus_p / one_minus_q;
      const double log_term =
          g == 0.0 ? 0.0 : g * std::pow(q, g - 1.0) * log_one_minus_q * p * one_minus_p;
      result.gradient(0, c) = -log_term + qg * p * ratio;
    }
  }
  return result;
}

double ScheduledSamplingProb(std::int64_t step, double max_prob,
                             std::int64_t ramp_steps) {
  if (step < 0) throw InputError("step must be >= 0");
  if (ramp_steps < 1) throw InputError("ramp must be >= 1 step");
  return max_prob * std::min(static_cast<double>(step) / static_cast<double>(ramp_steps), 1.0);
}

double VarWarmupLambda(std::int64_t step, double lambda, std::int64_t warmup_steps) {
  if (step < 0) throw InputError("step must be >= 0");
  if (warmup_steps < 1) throw InputError("warmup must be >= 1 step");
  return lambda * std::min(static_cast<double>(step) / static_cast<double>(warmup_steps), 1.0);
}

}  // namespace sgmod
