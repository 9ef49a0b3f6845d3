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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgmod/bias_audit.h"
#include "sgmod/errors.h"
#include "sgmod/evaluator.h"
#include "sgmod/losscheck.h"
#include "sgmod/metrics.h"
#include "sgmod/parser.h"
#include "sgmod/report_io.h"
#include "sgmod/vocabulary.h"

namespace sgmod {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct EvaluateArgs {
  std::string vocab;
  std::string gt;
  std::string pred;
  std::string embeddings;
  double iou = kDefaultIouThreshold;
  std::string averaging = "corpus";
  std::string supported_tags;
  std::size_t workers = 1;
  std::string out_dir;
  std::string formats = "json,md,csv";
  bool match_log = false;
  std::string name;
};

struct AuditArgs {
  std::string vocab;
  std::string gt;
  std::string out_dir;
  double smoothing = kDefaultLogOddsSmoothing;
};

struct LossCheckArgs {
  std::string fixtures;
  double tolerance = kDefaultLossTolerance;
  std::string out;
};

struct ReportArgs {
  std::vector<std::string> reports;
  std::string format = "markdown";
  std::string out;
};

Vocabulary LoadVocabularyOrDefault(const std::string& path) {
  if (path.empty()) return Vocabulary::Default();
  return LoadVocabulary(path);
}

std::set<std::string> SplitList(const std::string& text) {
  std::set<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.insert(item.substr(first, last - first + 1));
  }
  return out;
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
  if (!out) throw InputError("write failed: " + path.string());
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InputError("cannot create output directory " + dir.string());
  }
}

int RunEvaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  if (!(args.iou > 0.0 && args.iou <= 1.0)) {
    throw InputError("--iou must be in (0, 1]");
  }
  const auto averaging = AveragingModeFromName(args.averaging);
  if (!averaging) throw InputError("--averaging must be 'corpus' or 'per-frame'");
  const std::set<std::string> formats = SplitList(args.formats);
  for (const auto& f : formats) {
    if (f != "json" && f != "md" && f != "csv") {
      throw InputError("unknown report format '" + f + "'");
    }
  }

  const Vocabulary vocab = LoadVocabularyOrDefault(args.vocab);
  std::set<std::string> supported;
  for (const auto& tag : SplitList(args.supported_tags)) {
    supported.insert(vocab.Canonicalize(tag));
  }
  if (!args.supported_tags.empty() && supported.empty()) {
    throw InputError("--supported-tags is empty");
  }

  const std::vector<FrameRecord> gt = ParseGroundTruthFile(args.gt, vocab);
  std::ifstream pred_in(args.pred);
  if (!pred_in) throw InputError("cannot open predictions: " + args.pred);
  const PredictionSet predictions = ReadPredictions(pred_in, vocab);

  std::optional<EmbeddingSidecar> embeddings;
  if (!args.embeddings.empty()) embeddings = LoadEmbeddings(args.embeddings);

  std::set<std::string> gt_ids;
  for (const auto& frame : gt) gt_ids.insert(frame.frame_id);
  for (const auto& frame : gt) {
    if (!predictions.frames.contains(frame.frame_id)) {
      err << "warning: no prediction for frame '" << frame.frame_id
          << "'; scored as empty\n";
    }
  }
  for (const auto& [id, frame] : predictions.frames) {
    if (!gt_ids.contains(id)) {
      err << "warning: prediction for unknown frame '" << id << "' ignored\n";
    }
  }
  if (predictions.duplicate_ids > 0) {
    err << "warning: " << predictions.duplicate_ids
        << " duplicate prediction line(s) ignored\n";
  }

  EvaluationOptions options;
  options.iou_threshold = args.iou;
  options.workers = args.workers;
  options.embeddings = embeddings ? &*embeddings : nullptr;
  std::vector<FrameResult> per_frame;
  EvaluationTotals totals = Evaluate(gt, predictions.frames, vocab, options,
                                     args.match_log ? &per_frame : nullptr);
  totals.parse_failures = static_cast<std::int64_t>(predictions.failures.size());

  ReportOptions report_options;
  report_options.name =
      args.name.empty() ? fs::path(args.pred).stem().string() : args.name;
  report_options.averaging = *averaging;
  report_options.iou_threshold = args.iou;
  report_options.supported_tags = supported;
  if (embeddings) report_options.embedding_model = embeddings->model;
  const EvaluationReport report = BuildReport(totals, vocab, report_options);

  const fs::path dir(args.out_dir);
  EnsureDirectory(dir);
  if (formats.contains("json")) WriteFile(dir / "report.json", SerializeReport(report));
  const std::vector<EvaluationReport> single{report};
  if (formats.contains("md")) WriteFile(dir / "report.md", RenderMarkdown(single));
  if (formats.contains("csv")) WriteFile(dir / "report.csv", RenderCsv(single));

  std::string failures;
  for (const auto& f : predictions.failures) {
    json dropped = json::array();
    for (const auto& d : f.dropped) {
      dropped.push_back({{"fragment", d.fragment}, {"reason", d.reason}});
    }
    failures += json{{"line", f.line},
                     {"frame_id", f.frame_id.empty() ? json(nullptr) : json(f.frame_id)},
                     {"dropped", std::move(dropped)}}
                    .dump(-1, ' ', false, json::error_handler_t::replace);
    failures += "\n";
  }
  WriteFile(dir / "parse_failures.jsonl", failures);

  if (args.match_log) {
    std::string log;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      auto it = predictions.frames.find(gt[i].frame_id);
      const FrameRecord* pred = it == predictions.frames.end() ? nullptr : &it->second;
      log += MatchLogRecord(per_frame[i], gt[i], pred)
                 .dump(-1, ' ', false, json::error_handler_t::replace);
      log += "\n";
    }
    WriteFile(dir / "matches.jsonl", log);
  }

  char line[256];
  std::snprintf(line, sizeof(line),
                "%s: R_SB %.4f  P_SB %.4f  F1_SB %.4f  F1^tag %.4f  F1^s %.4f "
                "(%lld frames, %lld missing, %lld extra, %lld parse failures)\n",
                report.name.c_str(), report.r_sb, report.p_sb, report.f1_sb,
                report.tag_f1_macro, report.safety_f1,
                static_cast<long long>(report.frame_count),
                static_cast<long long>(report.missing_predictions),
                static_cast<long long>(report.extra_predictions),
                static_cast<long long>(report.parse_failures));
  out << line;
  return kExitOk;
}

int RunAudit(const AuditArgs& args, std::ostream& out) {
  const Vocabulary vocab = LoadVocabularyOrDefault(args.vocab);
  const std::vector<FrameRecord> records = ParseGroundTruthFile(args.gt, vocab);
  const BiasReport report = AuditSplit(records, vocab, args.smoothing);
  const fs::path dir(args.out_dir);
  EnsureDirectory(dir);
  WriteFile(dir / "audit.json",
            BiasReportToJson(report).dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  const std::string markdown = RenderBiasMarkdown(report);
  WriteFile(dir / "audit.md", markdown);
  out << "audited " << report.frames << " frames across " << report.splits.size()
      << " split(s); movie HHI " << report.movie_hhi << "\n";
  return kExitOk;
}

int RunLossCheckCommand(const LossCheckArgs& args, std::ostream& out) {
  const LossCheckReport report = RunLossCheck(args.fixtures, args.tolerance);
  out << RenderLossCheck(report);
  if (!args.out.empty()) {
    WriteFile(args.out, LossCheckToJson(report).dump(2) + "\n");
  }
  return report.passed() ? kExitOk : kExitToleranceFailure;
}

int RunReport(const ReportArgs& args, std::ostream& out) {
  std::vector<EvaluationReport> reports;
  for (const auto& path : args.reports) reports.push_back(LoadReport(path));
  if (reports.size() > 1) reports = Leaderboard(std::move(reports));
  std::string text;
  if (args.format == "markdown" || args.format == "md") {
    text = RenderMarkdown(reports);
  } else if (args.format == "csv") {
    text = RenderCsv(reports);
  } else {
    throw InputError("--format must be 'markdown' or 'csv'");
  }
  if (args.out.empty()) {
    out << text;
  } else {
    WriteFile(args.out, text);
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grounded scene-graph evaluation for sensitive-content moderation"};
  app.name("sgmod");
  app.require_subcommand(1);

  EvaluateArgs eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate->add_option("--vocab", eval.vocab, "Vocabulary JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--gt", eval.gt, "Ground-truth JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--pred", eval.pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--embeddings", eval.embeddings, "Caption embeddings sidecar")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--iou", eval.iou, "IoU threshold in (0, 1]")->capture_default_str();
  evaluate->add_option("--averaging", eval.averaging, "corpus | per-frame")->capture_default_str();
  evaluate->add_option("--supported-tags", eval.supported_tags,
                       "Comma-separated tags the model can emit (default: all)");
  evaluate->add_option("--workers", eval.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  evaluate->add_option("--out", eval.out_dir, "Output directory")->required();
  evaluate->add_option("--formats", eval.formats, "Comma-separated: json,md,csv")
      ->capture_default_str();
  evaluate->add_flag("--match-log", eval.match_log, "Write matches.jsonl");
  evaluate->add_option("--name", eval.name, "Model name in tables (default: predictions file stem)");

  AuditArgs audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Bias statistics over a dataset");
  audit_cmd->add_option("--vocab", audit.vocab, "Vocabulary JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--gt", audit.gt, "Dataset JSONL with split and movie_id")
      ->required()
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--out", audit.out_dir, "Output directory")->required();
  audit_cmd->add_option("--smoothing", audit.smoothing, "Log-odds smoothing")->capture_default_str();

  LossCheckArgs losscheck;
  CLI::App* losscheck_cmd = app.add_subcommand("losscheck", "Verify loss kernels against fixtures");
  losscheck_cmd->add_option("--fixtures", losscheck.fixtures, "Fixture directory")->required();
  losscheck_cmd->add_option("--tolerance", losscheck.tolerance, "Relative error tolerance")
      ->capture_default_str();
  losscheck_cmd->add_option("--out", losscheck.out, "Write the summary as JSON");

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Render report JSON as tables");
  report_cmd->add_option("reports", report.reports, "report.json files")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--format", report.format, "markdown | csv")->capture_default_str();
  report_cmd->add_option("--out", report.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (evaluate->parsed()) return RunEvaluate(eval, out, err);
    if (audit_cmd->parsed()) return RunAudit(audit, out);
    if (losscheck_cmd->parsed()) return RunLossCheckCommand(losscheck, out);
    if (report_cmd->parsed()) return RunReport(report, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariantError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariantError;
  }
  return kExitInputError;
}

}  // namespace sgmod
