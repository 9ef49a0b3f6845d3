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

// Split-curation bias statistics over tag, movie, and split distributions.
// All logarithms are natural.

#ifndef SGMOD_BIAS_AUDIT_H_
#define SGMOD_BIAS_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgmod/scene_graph.h"
#include "sgmod/vocabulary.h"

namespace sgmod {

inline constexpr double kDefaultLogOddsSmoothing = 0.5;

// Herfindahl-Hirschman index: sum of squared shares. Throws InputError on a
// negative count or a zero total.
double Hhi(std::span<const double> counts);

// Joint counts n(x, y) over two labelled categorical variables.
class CooccurrenceTable {
 public:
  CooccurrenceTable() = default;
  CooccurrenceTable(std::vector<std::string> row_labels,
                    std::vector<std::string> col_labels);

  // Throws InputError on an unknown label or a negative count.
  void Add(const std::string& row, const std::string& col, double n = 1.0);
  void Set(std::size_t r, std::size_t c, double n);

  double at(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

  double RowTotal(std::size_t r) const;
  double ColTotal(std::size_t c) const;
  double Total() const;

  CooccurrenceTable Transposed() const;

 private:
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<double> cells_;
};

using CellMatrix = std::vector<std::vector<std::optional<double>>>;

// log(p(x,y) / (p(x)p(y))) / -log p(x,y). Cells with n(x,y) = 0 are absent;
// a cell holding all the mass (p(x,y) = 1) is 1.
CellMatrix Npmi(const CooccurrenceTable& table);

// p(x,y) / (p(x)p(y)); absent where a marginal is zero.
CellMatrix Lift(const CooccurrenceTable& table);

// Smoothed log-odds ratio of each key between groups A and B, over the union
// of keys. Throws InputError unless smoothing > 0.
std::map<std::string, double> LogOdds(const std::map<std::string, double>& counts_a,
                                      double total_a,
                                      const std::map<std::string, double>& counts_b,
                                      double total_b,
                                      double smoothing = kDefaultLogOddsSmoothing);

struct SplitSummary {
  std::string split;
  std::int64_t frames = 0;
  std::int64_t sensitive = 0;
  std::int64_t general = 0;
  std::int64_t movies = 0;
  std::map<std::string, std::int64_t> tag_counts;  // frames carrying each tag
  std::optional<double> tag_hhi;                   // absent without tags
  double movie_hhi = 0.0;
};

struct TablePair {
  CooccurrenceTable counts;
  CellMatrix npmi;
  CellMatrix lift;
};

struct BiasReport {
  std::int64_t frames = 0;
  std::vector<SplitSummary> splits;  // train, val, test order; absent splits skipped
  std::map<std::string, std::int64_t> tag_totals;
  // HHI of per-tag totals within each category that has any tagged frame.
  std::map<std::string, double> category_tag_hhi;
  double movie_hhi = 0.0;
  TablePair tag_by_split;
  TablePair tag_by_movie;
  // (split A, split B) -> per-tag log-odds of A versus B.
  std::vector<std::pair<std::pair<std::string, std::string>,
                        std::map<std::string, double>>>
      log_odds;
  double smoothing = kDefaultLogOddsSmoothing;
};

// Every record needs a split and a movie id (InputError otherwise).
BiasReport AuditSplit(std::span<const FrameRecord> records,
                      const Vocabulary& vocab,
                      double smoothing = kDefaultLogOddsSmoothing);

nlohmann::json BiasReportToJson(const BiasReport& report);
std::string RenderBiasMarkdown(const BiasReport& report);

}  // namespace sgmod

#endif  // SGMOD_BIAS_AUDIT_H_
