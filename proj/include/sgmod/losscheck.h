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

// Verification harness for the loss kernels: reads JSON fixtures, checks
// values against stored expectations, gradients against central finite
// differences, and the search-based kernels against exhaustive oracles.
// The fixture schema is documented in docs/formats.md.

#ifndef SGMOD_LOSSCHECK_H_
#define SGMOD_LOSSCHECK_H_

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmod/loss_kernels.h"
#include "sgmod/matrix.h"

namespace sgmod {

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kDefaultLossTolerance = 1e-6;

// Central differences of `f` at `x`, one coordinate at a time.
Matrix NumericGradient(const std::function<double(const Matrix&)>& f,
                       const Matrix& x, double h = kFiniteDifferenceStep);

// max_i |a_i - n_i| / max(max_i |a_i|, max_i |n_i|); 0 when both are zero.
double GradientRelativeError(const Matrix& analytic, const Matrix& numeric);

// |a - b| / max(|a|, |b|); 0 when both are zero.
double RelativeError(double a, double b);

// Teacher-forced toy model: the logits at step t are row prev_t of `weights`,
// where prev_0 = bos and prev_t = targets[t - 1].
SequenceEvaluator BigramEvaluator(Matrix weights, int bos);

// Positions covered by any sensitive word, found by comparing every word at
// every offset with no first-token screen.
std::vector<std::size_t> SensitivePositionsExhaustive(
    std::span<const int> targets, const SensitiveTokenTable& table);

struct FixtureResult {
  std::string file;
  std::string name;
  std::string kernel;
  bool passed = true;
  double value_error = 0.0;
  double gradient_error = 0.0;
  std::string detail;  // first failing check, empty when passed
};

struct KernelSummary {
  int fixtures = 0;
  int failures = 0;
  double max_value_error = 0.0;
  double max_gradient_error = 0.0;
};

struct LossCheckReport {
  double tolerance = kDefaultLossTolerance;
  std::vector<FixtureResult> fixtures;
  std::map<std::string, KernelSummary> kernels;

  bool passed() const;
};

// Runs one fixture object. Throws InputError on a malformed fixture.
FixtureResult RunFixture(const nlohmann::json& fixture, const std::string& file,
                         double tolerance = kDefaultLossTolerance);

// Runs every *.json file in `dir` in name order. A file holds one fixture
// object or {"fixtures": [...]}. Throws InputError when the directory has no
// fixtures.
LossCheckReport RunLossCheck(const std::filesystem::path& dir,
                             double tolerance = kDefaultLossTolerance);

nlohmann::json LossCheckToJson(const LossCheckReport& report);
std::string RenderLossCheck(const LossCheckReport& report);

}  // namespace sgmod

#endif  // SGMOD_LOSSCHECK_H_
