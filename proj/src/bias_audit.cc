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

#include "sgmod/bias_audit.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sgmod/errors.h"

namespace sgmod {
namespace {

using nlohmann::json;

json CellsJson(const CellMatrix& cells) {
  json out = json::array();
  for (const auto& row : cells) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    out.push_back(std::move(r));
  }
  return out;
}

json TableJson(const TablePair& t) {
  json counts = json::array();
  for (std::size_t r = 0; r < t.counts.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < t.counts.cols(); ++c) row.push_back(t.counts.at(r, c));
    counts.push_back(std::move(row));
  }
  return {{"rows", t.counts.row_labels()},
          {"cols", t.counts.col_labels()},
          {"counts", std::move(counts)},
          {"npmi", CellsJson(t.npmi)},
          {"lift", CellsJson(t.lift)}};
}

std::string Fmt(double v, const char* spec = "%.4f") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string Fmt(const std::optional<double>& v) { return v ? Fmt(*v) : "n/a"; }

TablePair MakeTablePair(CooccurrenceTable table) {
  CellMatrix npmi = Npmi(table);
  CellMatrix lift = Lift(table);
  return {std::move(table), std::move(npmi), std::move(lift)};
}

}  // namespace

double Hhi(std::span<const double> counts) {
  double total = 0.0;
  for (double n : counts) {
    if (n < 0.0) throw InputError("HHI: negative count");
    total += n;
  }
  if (total <= 0.0) throw InputError("HHI: total count is zero");
  double sum = 0.0;
  for (double n : counts) {
    const double share = n / total;
    sum += share * share;
  }
  return sum;
}

CooccurrenceTable::CooccurrenceTable(std::vector<std::string> row_labels,
                                     std::vector<std::string> col_labels)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      cells_(row_labels_.size() * col_labels_.size(), 0.0) {}

void CooccurrenceTable::Add(const std::string& row, const std::string& col,
                            double n) {
  auto r = std::find(row_labels_.begin(), row_labels_.end(), row);
  auto c = std::find(col_labels_.begin(), col_labels_.end(), col);
  if (r == row_labels_.end() || c == col_labels_.end()) {
    throw InputError("co-occurrence table has no cell (" + row + ", " + col + ")");
  }
  const std::size_t i = static_cast<std::size_t>(r - row_labels_.begin());
  const std::size_t j = static_cast<std::size_t>(c - col_labels_.begin());
  Set(i, j, at(i, j) + n);
}

void CooccurrenceTable::Set(std::size_t r, std::size_t c, double n) {
  if (n < 0.0) throw InputError("co-occurrence counts must be non-negative");
  cells_[r * cols() + c] = n;
}

double CooccurrenceTable::RowTotal(std::size_t r) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < cols(); ++c) sum += at(r, c);
  return sum;
}

double CooccurrenceTable::ColTotal(std::size_t c) const {
  double sum = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) sum += at(r, c);
  return sum;
}

double CooccurrenceTable::Total() const {
  double sum = 0.0;
  for (double v : cells_) sum += v;
  return sum;
}

CooccurrenceTable CooccurrenceTable::Transposed() const {
  CooccurrenceTable t(col_labels_, row_labels_);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) t.Set(c, r, at(r, c));
  }
  return t;
}

CellMatrix Npmi(const CooccurrenceTable& table) {
  CellMatrix out(table.rows(),
                 std::vector<std::optional<double>>(table.cols()));
  const double n = table.Total();
  if (n <= 0.0) return out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double px = table.RowTotal(r) / n;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table.at(r, c) <= 0.0) continue;
      const double pxy = table.at(r, c) / n;
      const double py = table.ColTotal(c) / n;
      if (pxy >= 1.0) {
        out[r][c] = 1.0;
        continue;
      }
      out[r][c] = std::log(pxy / (px * py)) / -std::log(pxy);
    }
  }
  return out;
}

CellMatrix Lift(const CooccurrenceTable& table) {
  CellMatrix out(table.rows(),
                 std::vector<std::optional<double>>(table.cols()));
  const double n = table.Total();
  if (n <= 0.0) return out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double px = table.RowTotal(r) / n;
    if (px <= 0.0) continue;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const double py = table.ColTotal(c) / n;
      if (py <= 0.0) continue;
      out[r][c] = (table.at(r, c) / n) / (px * py);
    }
  }
  return out;
}

std::map<std::string, double> LogOdds(const std::map<std::string, double>& counts_a,
                                      double total_a,
                                      const std::map<std::string, double>& counts_b,
                                      double total_b, double smoothing) {
  if (!(smoothing > 0.0)) throw InputError("log-odds smoothing must be positive");
  std::set<std::string> keys;
  for (const auto& [k, v] : counts_a) keys.insert(k);
  for (const auto& [k, v] : counts_b) keys.insert(k);
  std::map<std::string, double> out;
  for (const auto& key : keys) {
    auto a_it = counts_a.find(key);
    auto b_it = counts_b.find(key);
    const double na = a_it == counts_a.end() ? 0.0 : a_it->second;
    const double nb = b_it == counts_b.end() ? 0.0 : b_it->second;
    const double odds_a = (na + smoothing) / (total_a - na + smoothing);
    const double odds_b = (nb + smoothing) / (total_b - nb + smoothing);
    out[key] = std::log(odds_a) - std::log(odds_b);
  }
  return out;
}

BiasReport AuditSplit(std::span<const FrameRecord> records,
                      const Vocabulary& vocab, double smoothing) {
  BiasReport report;
  report.smoothing = smoothing;
  report.frames = static_cast<std::int64_t>(records.size());

  std::set<std::string> movie_set;
  std::set<Split> split_set;
  for (const auto& frame : records) {
    if (!frame.split) {
      throw InputError("frame '" + frame.frame_id + "' has no split");
    }
    if (!frame.movie_id) {
      throw InputError("frame '" + frame.frame_id + "' has no movie_id");
    }
    movie_set.insert(*frame.movie_id);
    split_set.insert(*frame.split);
  }
  if (records.empty()) throw InputError("audit needs at least one frame");

  const std::vector<std::string>& tags = vocab.tags();
  std::vector<std::string> split_names;
  for (Split s : split_set) split_names.emplace_back(SplitName(s));
  std::vector<std::string> movies(movie_set.begin(), movie_set.end());

  CooccurrenceTable tag_split(tags, split_names);
  CooccurrenceTable tag_movie(tags, movies);
  std::map<std::string, double> movie_frames;
  std::map<Split, std::map<std::string, double>> split_movie_frames;
  std::map<Split, SplitSummary> summaries;

  for (const auto& frame : records) {
    const std::string split(SplitName(*frame.split));
    SplitSummary& s = summaries[*frame.split];
    s.split = split;
    ++s.frames;
    if (frame.IsSensitive()) {
      ++s.sensitive;
    } else {
      ++s.general;
    }
    movie_frames[*frame.movie_id] += 1.0;
    split_movie_frames[*frame.split][*frame.movie_id] += 1.0;
    for (const auto& tag : frame.tags) {
      ++s.tag_counts[tag];
      ++report.tag_totals[tag];
      tag_split.Add(tag, split);
      tag_movie.Add(tag, *frame.movie_id);
    }
  }

  auto values = [](const std::map<std::string, double>& m) {
    std::vector<double> v;
    for (const auto& [k, n] : m) v.push_back(n);
    return v;
  };
  for (auto& [split, s] : summaries) {
    const auto& per_movie = split_movie_frames[split];
    s.movies = static_cast<std::int64_t>(per_movie.size());
    s.movie_hhi = Hhi(values(per_movie));
    if (!s.tag_counts.empty()) {
      std::vector<double> counts;
      for (const auto& [tag, n] : s.tag_counts) counts.push_back(static_cast<double>(n));
      s.tag_hhi = Hhi(counts);
    }
    report.splits.push_back(s);
  }
  report.movie_hhi = Hhi(values(movie_frames));

  for (Category category : kAllCategories) {
    std::vector<double> counts;
    double total = 0.0;
    for (const auto& tag : vocab.TagsIn(category)) {
      auto it = report.tag_totals.find(tag);
      const double n = it == report.tag_totals.end() ? 0.0 : static_cast<double>(it->second);
      counts.push_back(n);
      total += n;
    }
    if (total > 0.0) {
      report.category_tag_hhi[std::string(CategoryName(category))] = Hhi(counts);
    }
  }

  report.tag_by_split = MakeTablePair(std::move(tag_split));
  report.tag_by_movie = MakeTablePair(std::move(tag_movie));

  for (std::size_t i = 0; i < report.splits.size(); ++i) {
    for (std::size_t j = i + 1; j < report.splits.size(); ++j) {
      const SplitSummary& a = report.splits[i];
      const SplitSummary& b = report.splits[j];
      std::map<std::string, double> ca, cb;
      for (const auto& tag : tags) {
        auto ia = a.tag_counts.find(tag);
        auto ib = b.tag_counts.find(tag);
        ca[tag] = ia == a.tag_counts.end() ? 0.0 : static_cast<double>(ia->second);
        cb[tag] = ib == b.tag_counts.end() ? 0.0 : static_cast<double>(ib->second);
      }
      report.log_odds.push_back(
          {{a.split, b.split},
           LogOdds(ca, static_cast<double>(a.frames), cb,
                   static_cast<double>(b.frames), smoothing)});
    }
  }
  return report;
}

json BiasReportToJson(const BiasReport& report) {
  json splits = json::array();
  for (const auto& s : report.splits) {
    splits.push_back({{"split", s.split},
                      {"frames", s.frames},
                      {"sensitive", s.sensitive},
                      {"general", s.general},
                      {"movies", s.movies},
                      {"tag_counts", s.tag_counts},
                      {"tag_hhi", s.tag_hhi ? json(*s.tag_hhi) : json(nullptr)},
                      {"movie_hhi", s.movie_hhi}});
  }
  json log_odds = json::array();
  for (const auto& [pair, values] : report.log_odds) {
    log_odds.push_back({{"a", pair.first}, {"b", pair.second}, {"values", values}});
  }
  return {{"log_base", "e"},
          {"smoothing", report.smoothing},
          {"frames", report.frames},
          {"splits", std::move(splits)},
          {"tag_totals", report.tag_totals},
          {"category_tag_hhi", report.category_tag_hhi},
          {"movie_hhi", report.movie_hhi},
          {"tag_by_split", TableJson(report.tag_by_split)},
          {"tag_by_movie", TableJson(report.tag_by_movie)},
          {"log_odds", std::move(log_odds)}};
}

std::string RenderBiasMarkdown(const BiasReport& report) {
  std::ostringstream out;
  out << "# Bias audit\n\nNatural logarithms; log-odds smoothing "
      << Fmt(report.smoothing, "%g") << ". Frames: " << report.frames
      << ". Overall movie HHI: " << Fmt(report.movie_hhi) << ".\n\n";

  out << "## Split balance\n\n| Split | Frames | Sensitive | General | Movies | "
         "Tag HHI | Movie HHI |\n|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& s : report.splits) {
    out << "| " << s.split << " | " << s.frames << " | " << s.sensitive << " | "
        << s.general << " | " << s.movies << " | " << Fmt(s.tag_hhi) << " | "
        << Fmt(s.movie_hhi) << " |\n";
  }

  const TablePair& ts = report.tag_by_split;
  out << "\n## Tags by split\n\n| Tag";
  for (const auto& c : ts.counts.col_labels()) out << " | " << c;
  out << " | Total";
  for (const auto& c : ts.counts.col_labels()) out << " | lift " << c;
  for (const auto& c : ts.counts.col_labels()) out << " | nPMI " << c;
  out << " |\n|---";
  for (std::size_t i = 0; i < 3 * ts.counts.cols() + 1; ++i) out << "|---:";
  out << "|\n";
  for (std::size_t r = 0; r < ts.counts.rows(); ++r) {
    out << "| " << ts.counts.row_labels()[r];
    for (std::size_t c = 0; c < ts.counts.cols(); ++c) {
      out << " | " << Fmt(ts.counts.at(r, c), "%.0f");
    }
    out << " | " << Fmt(ts.counts.RowTotal(r), "%.0f");
    for (std::size_t c = 0; c < ts.counts.cols(); ++c) out << " | " << Fmt(ts.lift[r][c]);
    for (std::size_t c = 0; c < ts.counts.cols(); ++c) out << " | " << Fmt(ts.npmi[r][c]);
    out << " |\n";
  }

  if (!report.category_tag_hhi.empty()) {
    out << "\n## Tag concentration within categories\n\n| Category | HHI |\n|---|---:|\n";
    for (const auto& [category, hhi] : report.category_tag_hhi) {
      out << "| " << category << " | " << Fmt(hhi) << " |\n";
    }
  }

  for (const auto& [pair, values] : report.log_odds) {
    out << "\n## Log-odds " << pair.first << " vs " << pair.second
        << "\n\n| Tag | Log-odds |\n|---|---:|\n";
    for (const auto& [tag, v] : values) out << "| " << tag << " | " << Fmt(v) << " |\n";
  }
  out << "\nTag by movie nPMI and lift matrices are in the JSON report.\n";
  return out.str();
}

}  // namespace sgmod
