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

#include "sgmod/losscheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

using nlohmann::json;

const json& Require(const json& fixture, const char* key) {
  if (!fixture.contains(key)) {
    throw InputError(std::string("fixture is missing '") + key + "'");
  }
  return fixture.at(key);
}

double GetNumber(const json& fixture, const char* key, double fallback) {
  if (!fixture.contains(key)) return fallback;
  if (!fixture.at(key).is_number()) {
    throw InputError(std::string("fixture field '") + key + "' must be a number");
  }
  return fixture.at(key).get<double>();
}

Matrix ReadMatrix(const json& node, const char* key) {
  const json& rows = node;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
    throw InputError(std::string("fixture field '") + key + "' must be a non-empty matrix");
  }
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != m.cols()) {
      throw InputError(std::string("fixture field '") + key + "' is ragged");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!rows[r][c].is_number()) {
        throw InputError(std::string("fixture field '") + key + "' must hold numbers");
      }
      m(r, c) = rows[r][c].get<double>();
    }
  }
  return m;
}

template <typename T>
std::vector<T> ReadVector(const json& node, const char* key) {
  if (!node.is_array()) {
    throw InputError(std::string("fixture field '") + key + "' must be a list");
  }
  std::vector<T> out;
  for (const auto& v : node) {
    if (!v.is_number()) {
      throw InputError(std::string("fixture field '") + key + "' must hold numbers");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Checker {
 public:
  Checker(FixtureResult& result, double tolerance)
      : result_(result), tolerance_(tolerance) {}

  void Value(double actual, const json& fixture) {
    if (!fixture.contains("expected_value")) return;
    const double expected = fixture.at("expected_value").get<double>();
    const double err = RelativeError(actual, expected);
    result_.value_error = std::max(result_.value_error, err);
    if (!(err < tolerance_)) {
      Fail("value " + Num(actual) + " differs from expected " + Num(expected) +
           " (rel. err " + Num(err) + ")");
    }
  }

  void Gradient(const Matrix& analytic, const Matrix& numeric) {
    const double err = GradientRelativeError(analytic, numeric);
    result_.gradient_error = std::max(result_.gradient_error, err);
    if (!(err < tolerance_)) {
      Fail("gradient differs from finite differences (rel. err " + Num(err) + ")");
    }
  }

  void Expect(bool ok, const std::string& what) {
    if (!ok) Fail(what);
  }

 private:
  void Fail(const std::string& detail) {
    if (result_.passed) result_.detail = detail;
    result_.passed = false;
  }

  FixtureResult& result_;
  double tolerance_;
};

LogitsSequence ReadSequence(const json& fixture) {
  LogitsSequence seq;
  seq.logits = ReadMatrix(Require(fixture, "logits"), "logits");
  seq.targets = ReadVector<int>(Require(fixture, "targets"), "targets");
  ValidateSequence(seq);
  return seq;
}

void CheckSoftmaxCe(const json& fixture, Checker& check) {
  const LogitsSequence seq = ReadSequence(fixture);
  const double eps = GetNumber(fixture, "label_smoothing", 0.0);
  const LossResult r = SoftmaxCrossEntropy(seq, eps);
  check.Value(r.value, fixture);
  const Matrix numeric = NumericGradient(
      [&](const Matrix& z) { return SoftmaxCrossEntropy({z, seq.targets}, eps).value; },
      seq.logits);
  check.Gradient(r.gradient, numeric);
}

void CheckVarLoss(const json& fixture, Checker& check) {
  const LogitsSequence seq = ReadSequence(fixture);
  const auto sensitive = ReadVector<std::size_t>(Require(fixture, "sensitive"), "sensitive");
  const double lambda = GetNumber(fixture, "lambda", kDefaultVarLambda);
  const double gamma = GetNumber(fixture, "gamma", kDefaultVarGamma);
  const double eps = GetNumber(fixture, "label_smoothing", 0.0);
  const LossResult r = VarLoss(seq, sensitive, lambda, gamma, eps);
  check.Value(r.value, fixture);
  const Matrix numeric = NumericGradient(
      [&](const Matrix& z) {
        return VarLoss({z, seq.targets}, sensitive, lambda, gamma, eps).value;
      },
      seq.logits);
  check.Gradient(r.gradient, numeric);
  const double ce = SoftmaxCrossEntropy(seq, eps).value;
  check.Expect(r.value >= ce, "VAR value below cross-entropy");
}

void CheckAsl(const json& fixture, Checker& check) {
  const auto logits = ReadVector<double>(Require(fixture, "logits"), "logits");
  const auto labels = ReadVector<int>(Require(fixture, "labels"), "labels");
  const AslConfig config{GetNumber(fixture, "gamma_pos", 0.0),
                         GetNumber(fixture, "gamma_neg", 0.0),
                         GetNumber(fixture, "margin", 0.0)};
  const LossResult r = AsymmetricLoss(logits, labels, config);
  check.Value(r.value, fixture);
  Matrix x(1, logits.size());
  std::copy(logits.begin(), logits.end(), x.data().begin());
  const Matrix numeric = NumericGradient(
      [&](const Matrix& z) { return AsymmetricLoss(z.data(), labels, config).value; }, x);
  check.Gradient(r.gradient, numeric);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (labels[c] != 0) {
      check.Expect(r.gradient(0, c) <= 0.0,
                   "positive-label gradient is positive at class " + std::to_string(c));
    }
  }
}

void CheckSensitivePositions(const json& fixture, Checker& check) {
  std::map<std::string, std::vector<int>> tokenization;
  const json& tokenizer = Require(fixture, "tokenizer");
  if (!tokenizer.is_object()) throw InputError("fixture field 'tokenizer' must be an object");
  for (const auto& [word, ids] : tokenizer.items()) {
    tokenization.emplace(word, ReadVector<int>(ids, "tokenizer"));
  }
  std::vector<std::string> words;
  for (const auto& w : Require(fixture, "sensitive_words")) words.push_back(w.get<std::string>());
  const SensitiveTokenTable table(tokenization, words);
  const auto targets = ReadVector<int>(Require(fixture, "targets"), "targets");
  const auto fast = SensitivePositions(targets, table);
  const auto slow = SensitivePositionsExhaustive(targets, table);
  check.Expect(fast == slow, "first-token filter disagrees with the exhaustive scan");
  if (fixture.contains("expected_positions")) {
    const auto expected =
        ReadVector<std::size_t>(fixture.at("expected_positions"), "expected_positions");
    check.Expect(fast == expected, "positions differ from expected_positions");
  }
}

// Smallest CE over all orderings, enumerated by recursive swapping; ties are
// resolved toward the lexicographically smallest ordering.
void EnumerateOrders(std::vector<std::size_t>& prefix, std::vector<bool>& used,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (prefix.size() == used.size()) {
    visit(prefix);
    return;
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    prefix.push_back(i);
    EnumerateOrders(prefix, used, visit);
    prefix.pop_back();
    used[i] = false;
  }
}

void CheckMinPermutation(const json& fixture, Checker& check) {
  const Matrix weights = ReadMatrix(Require(fixture, "weights"), "weights");
  const int bos = static_cast<int>(GetNumber(fixture, "bos", 0));
  const SequenceEvaluator evaluator = BigramEvaluator(weights, bos);
  std::vector<std::vector<int>> elements;
  for (const auto& e : Require(fixture, "elements")) elements.push_back(ReadVector<int>(e, "elements"));
  const auto joiner = ReadVector<int>(Require(fixture, "joiner"), "joiner");
  const auto k_max = static_cast<std::size_t>(GetNumber(fixture, "k_max", kDefaultMaxPermutedElements));
  const double eps = GetNumber(fixture, "label_smoothing", 0.0);

  const MinPermutationResult r =
      MinPermutationCrossEntropy(evaluator, elements, joiner, k_max, eps);
  check.Value(r.value, fixture);

  auto ce = [&](const std::vector<std::size_t>& order) {
    LogitsSequence seq;
    seq.targets = JoinElements(elements, order, joiner);
    seq.logits = evaluator(seq.targets);
    return SoftmaxCrossEntropy(seq, eps).value;
  };
  std::vector<std::size_t> identity(elements.size());
  std::iota(identity.begin(), identity.end(), 0);
  const double original = ce(identity);
  check.Expect(r.value <= original, "minimum exceeds the original-order CE");

  if (elements.size() <= k_max) {
    double best = original;
    std::vector<std::size_t> best_order = identity;
    std::vector<std::size_t> prefix;
    std::vector<bool> used(elements.size(), false);
    EnumerateOrders(prefix, used, [&](const std::vector<std::size_t>& order) {
      const double v = ce(order);
      if (v < best || (v == best && order < best_order)) {
        best = v;
        best_order = order;
      }
    });
    check.Expect(r.value == best, "minimum " + Num(r.value) +
                                      " differs from exhaustive minimum " + Num(best));
    check.Expect(r.permutation == best_order, "argmin permutation differs from exhaustive search");
  } else {
    check.Expect(r.permutation == identity, "over-cap elements were reordered");
  }
  if (fixture.contains("expected_permutation")) {
    check.Expect(r.permutation == ReadVector<std::size_t>(fixture.at("expected_permutation"),
                                                          "expected_permutation"),
                 "permutation differs from expected_permutation");
  }
}

void CheckSchedule(const json& fixture, Checker& check) {
  for (const auto& item : Require(fixture, "checks")) {
    const std::string fn = Require(item, "fn").get<std::string>();
    const auto step = Require(item, "step").get<std::int64_t>();
    const double expected = Require(item, "expected").get<double>();
    double actual = 0.0;
    if (fn == "scheduled_sampling_prob") {
      actual = ScheduledSamplingProb(step);
    } else if (fn == "var_warmup_lambda") {
      actual = VarWarmupLambda(step, GetNumber(item, "lambda", kDefaultVarLambda),
                               static_cast<std::int64_t>(
                                   GetNumber(item, "warmup", kDefaultVarWarmupSteps)));
    } else {
      throw InputError("unknown schedule '" + fn + "'");
    }
    check.Expect(actual == expected, fn + "(" + std::to_string(step) + ") = " + Num(actual) +
                                         ", expected " + Num(expected));
  }
}

void Accumulate(LossCheckReport& report, const FixtureResult& r) {
  KernelSummary& k = report.kernels[r.kernel];
  ++k.fixtures;
  if (!r.passed) ++k.failures;
  k.max_value_error = std::max(k.max_value_error, r.value_error);
  k.max_gradient_error = std::max(k.max_gradient_error, r.gradient_error);
  report.fixtures.push_back(r);
}

}  // namespace

Matrix NumericGradient(const std::function<double(const Matrix&)>& f,
                       const Matrix& x, double h) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double up = f(probe);
    probe.data()[i] = orig - h;
    const double down = f(probe);
    probe.data()[i] = orig;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double GradientRelativeError(const Matrix& analytic, const Matrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw InvariantError("gradient shape mismatch");
  }
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.data().size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    diff = std::max(diff, std::abs(a - n));
    scale = std::max({scale, std::abs(a), std::abs(n)});
  }
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

double RelativeError(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

SequenceEvaluator BigramEvaluator(Matrix weights, int bos) {
  if (weights.rows() != weights.cols()) {
    throw InputError("bigram weights must be square");
  }
  if (bos < 0 || static_cast<std::size_t>(bos) >= weights.rows()) {
    throw InputError("bigram bos id outside the vocabulary");
  }
  return [weights = std::move(weights), bos](std::span<const int> targets) {
    Matrix logits(targets.size(), weights.cols());
    int prev = bos;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (prev < 0 || static_cast<std::size_t>(prev) >= weights.rows()) {
        throw InputError("bigram target id outside the vocabulary");
      }
      auto src = weights.row(static_cast<std::size_t>(prev));
      std::copy(src.begin(), src.end(), logits.row(t).begin());
      prev = targets[t];
    }
    return logits;
  };
}

std::vector<std::size_t> SensitivePositionsExhaustive(
    std::span<const int> targets, const SensitiveTokenTable& table) {
  std::vector<char> covered(targets.size(), 0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (const auto& seq : table.sequences()) {
      if (t + seq.size() > targets.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < seq.size() && match; ++k) {
        match = targets[t + k] == seq[k];
      }
      if (match) {
        for (std::size_t k = 0; k < seq.size(); ++k) covered[t + k] = 1;
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < covered.size(); ++t) {
    if (covered[t]) out.push_back(t);
  }
  return out;
}

bool LossCheckReport::passed() const {
  for (const auto& [kernel, summary] : kernels) {
    if (summary.failures > 0) return false;
  }
  return true;
}

FixtureResult RunFixture(const json& fixture, const std::string& file,
                         double tolerance) {
  if (!fixture.is_object()) throw InputError(file + ": fixture must be a JSON object");
  FixtureResult result;
  result.file = file;
  try {
    result.kernel = Require(fixture, "kernel").get<std::string>();
    result.name = fixture.value("name", file);
    Checker check(result, tolerance);
    if (result.kernel == "softmax_ce") {
      CheckSoftmaxCe(fixture, check);
    } else if (result.kernel == "var_loss") {
      CheckVarLoss(fixture, check);
    } else if (result.kernel == "asymmetric_loss") {
      CheckAsl(fixture, check);
    } else if (result.kernel == "sensitive_positions") {
      CheckSensitivePositions(fixture, check);
    } else if (result.kernel == "min_permutation_ce") {
      CheckMinPermutation(fixture, check);
    } else if (result.kernel == "schedule") {
      CheckSchedule(fixture, check);
    } else {
      throw InputError("unknown kernel '" + result.kernel + "'");
    }
  } catch (const InputError& e) {
    throw InputError(file + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(file + ": " + e.what());
  }
  return result;
}

LossCheckReport RunLossCheck(const std::filesystem::path& dir, double tolerance) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw InputError("fixture directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  LossCheckReport report;
  report.tolerance = tolerance;
  for (const auto& path : files) {
    std::ifstream in(path);
    json root = json::parse(in, nullptr, false);
    const std::string name = path.filename().string();
    if (root.is_discarded()) throw InputError(name + ": not valid JSON");
    if (root.is_object() && root.contains("fixtures")) {
      for (const auto& fixture : root["fixtures"]) {
        Accumulate(report, RunFixture(fixture, name, tolerance));
      }
    } else {
      Accumulate(report, RunFixture(root, name, tolerance));
    }
  }
  if (report.fixtures.empty()) {
    throw InputError("no fixtures found in " + dir.string());
  }
  return report;
}

json LossCheckToJson(const LossCheckReport& report) {
  json kernels = json::object();
  for (const auto& [kernel, s] : report.kernels) {
    kernels[kernel] = {{"fixtures", s.fixtures},
                       {"failures", s.failures},
                       {"max_value_rel_error", s.max_value_error},
                       {"max_gradient_rel_error", s.max_gradient_error}};
  }
  json failures = json::array();
  for (const auto& f : report.fixtures) {
    if (!f.passed) {
      failures.push_back({{"file", f.file}, {"name", f.name}, {"kernel", f.kernel},
                          {"detail", f.detail}});
    }
  }
  return {{"tolerance", report.tolerance},
          {"passed", report.passed()},
          {"kernels", std::move(kernels)},
          {"failures", std::move(failures)}};
}

std::string RenderLossCheck(const LossCheckReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %8s %8s %16s %16s\n", "kernel", "fixtures",
                "failed", "max value err", "max grad err");
  out << line;
  for (const auto& [kernel, s] : report.kernels) {
    std::snprintf(line, sizeof(line), "%-22s %8d %8d %16.3e %16.3e\n", kernel.c_str(),
                  s.fixtures, s.failures, s.max_value_error, s.max_gradient_error);
    out << line;
  }
  for (const auto& f : report.fixtures) {
    if (!f.passed) {
      out << "FAIL " << f.file << " [" << f.name << "]: " << f.detail << "\n";
    }
  }
  std::snprintf(line, sizeof(line), "%s (tolerance %g)\n",
                report.passed() ? "all checks passed" : "losscheck failed",
                report.tolerance);
  out << line;
  return out.str();
}

}  // namespace sgmod
