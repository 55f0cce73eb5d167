#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsumm/metrics.hpp"
#include "fsumm/stats.hpp"

namespace fsumm {

// Published BLEU-4 means for reference systems, shipped as static data
// (data/baselines.json) and never recomputed. Two tables are kept apart
// because both contain an "average" scope: "cross_project" is keyed by
// language, "same_project" by project.
struct BaselineTable {
  // table -> scope -> system -> published BLEU-4 mean
  std::map<std::string, std::map<std::string, std::map<std::string, double>>>
      tables;

  std::optional<double> get(const std::string& table, const std::string& scope,
                            const std::string& system) const;
};

// Throws Error(Errc::io) when unreadable, Error(Errc::malformed_line) on
// bad structure or values outside [0, 100].
BaselineTable load_baselines(const std::string& path);

struct ComparisonRow {
  std::string scope;  // language or project
  double score_a = 0.0;
  double score_b = 0.0;
  double improvement = 0.0;  // percent, b relative to a
  std::optional<double> p_value;
  WilcoxonMethod p_method = WilcoxonMethod::exact;
  bool all_zero_differences = false;
  std::size_t n = 0;
};

struct Report {
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;
};

// Pairs the two runs' per-sample scores by id, tests H1: b > a with the
// one-sided Wilcoxon signed-rank test, and computes the percent
// improvement of mean_bleu from a to b. Throws Error(Errc::id_set_mismatch)
// when the id sets differ and propagates NonpositiveBaseline from
// improvement_pct.
ComparisonRow build_comparison(const CorpusScore& a, const CorpusScore& b,
                               std::string scope);

enum class ReportFormat { json, csv, text_table };

ReportFormat parse_report_format(const std::string& s);

// Deterministic rendering: rows sorted by scope, reals at 2 decimals in
// csv/text (p-values below 0.01 print as "<0.01"), full precision in JSON.
// Throws Error(Errc::empty_batch) when the report has no rows.
std::string render_report(const Report& report, ReportFormat format);

}  // namespace fsumm
