#include "fsumm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "fsumm/errors.hpp"

namespace fsumm {

using nlohmann::json;

std::optional<double> BaselineTable::get(const std::string& table,
                                         const std::string& scope,
                                         const std::string& system) const {
  const auto t = tables.find(table);
  if (t == tables.end()) return std::nullopt;
  const auto s = t->second.find(scope);
  if (s == t->second.end()) return std::nullopt;
  const auto v = s->second.find(system);
  if (v == s->second.end()) return std::nullopt;
  return v->second;
}

BaselineTable load_baselines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io, "cannot open baselines file: " + path);
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line,
                std::string("baselines file is not valid JSON: ") + e.what());
  }

  BaselineTable table;
  try {
    for (const auto& [tname, scopes] : root.at("tables").items()) {
      for (const auto& [scope, systems] : scopes.items()) {
        for (const auto& [system, value] : systems.items()) {
          const double v = value.get<double>();
          if (v < 0.0 || v > 100.0) {
            throw Error(Errc::malformed_line,
                        "baseline value out of [0,100] at " + tname + "/" +
                            scope + "/" + system);
          }
          table.tables[tname][scope][system] = v;
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line,
                std::string("baselines file has unexpected structure: ") +
                    e.what());
  }
  return table;
}

ComparisonRow build_comparison(const CorpusScore& a, const CorpusScore& b,
                               std::string scope) {
  if (a.per_sample.size() != b.per_sample.size()) {
    throw Error(Errc::id_set_mismatch,
                "runs cover different sample counts (" +
                    std::to_string(a.per_sample.size()) + " vs " +
                    std::to_string(b.per_sample.size()) + ")");
  }
  std::vector<double> scores_a;
  std::vector<double> scores_b;
  scores_a.reserve(a.per_sample.size());
  scores_b.reserve(b.per_sample.size());
  for (const auto& [id, score] : a.per_sample) {
    const auto it = b.per_sample.find(id);
    if (it == b.per_sample.end()) {
      throw Error(Errc::id_set_mismatch,
                  "sample " + id + " present in one run only");
    }
    scores_a.push_back(score.value);
    scores_b.push_back(it->second.value);
  }

  ComparisonRow row;
  row.scope = std::move(scope);
  row.score_a = a.mean_bleu;
  row.score_b = b.mean_bleu;
  row.improvement = improvement_pct(a.mean_bleu, b.mean_bleu);
  const WilcoxonResult w = wilcoxon_one_sided(scores_b, scores_a);
  row.p_value = w.p_value;
  row.p_method = w.method;
  row.all_zero_differences = w.all_zero_differences;
  row.n = a.per_sample.size();
  return row;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "text-table" || s == "text") return ReportFormat::text_table;
  throw Error(Errc::config, "unknown report format: " + s);
}

namespace {

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string format_p(const std::optional<double>& p) {
  if (!p) return "";
  if (*p < 0.01) return "<0.01";
  return two_decimals(*p);
}

std::vector<ComparisonRow> sorted_rows(const Report& report) {
  std::vector<ComparisonRow> rows = report.rows;
  std::sort(rows.begin(), rows.end(),
            [](const ComparisonRow& x, const ComparisonRow& y) {
              return x.scope < y.scope;
            });
  return rows;
}

std::string render_json(const Report& report) {
  json doc;
  doc["label_a"] = report.label_a;
  doc["label_b"] = report.label_b;
  json rows = json::array();
  for (const ComparisonRow& r : sorted_rows(report)) {
    json row;
    row["scope"] = r.scope;
    row["score_a"] = r.score_a;
    row["score_b"] = r.score_b;
    row["improvement_pct"] = r.improvement;
    if (r.p_value) {
      row["p_value"] = *r.p_value;
      row["p_method"] =
          r.p_method == WilcoxonMethod::exact ? "exact" : "normal_approx";
    } else {
      row["p_value"] = nullptr;
    }
    row["all_zero_differences"] = r.all_zero_differences;
    row["n"] = r.n;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string render_csv(const Report& report) {
  std::string out = "scope,score_a,score_b,improvement_pct,p_value,n\n";
  for (const ComparisonRow& r : sorted_rows(report)) {
    out += r.scope;
    out += ',';
    out += two_decimals(r.score_a);
    out += ',';
    out += two_decimals(r.score_b);
    out += ',';
    out += two_decimals(r.improvement);
    out += ',';
    out += format_p(r.p_value);
    out += ',';
    out += std::to_string(r.n);
    out += '\n';
  }
  return out;
}

std::string render_text(const Report& report) {
  const std::vector<ComparisonRow> rows = sorted_rows(report);
  const std::vector<std::string> headers = {
      "scope", report.label_a, report.label_b, "improvement%", "p-value", "n"};

  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const ComparisonRow& r : rows) {
    cells.push_back({r.scope, two_decimals(r.score_a), two_decimals(r.score_b),
                     two_decimals(r.improvement), format_p(r.p_value),
                     std::to_string(r.n)});
  }

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : cells) widths[c] = std::max(widths[c], row[c].size());
  }

  auto emit_row = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != 0) line += "  ";
      // First column left-aligned, numbers right-aligned.
      const std::size_t pad = widths[c] - row[c].size();
      if (c == 0) {
        line += row[c];
        line += std::string(pad, ' ');
      } else {
        line += std::string(pad, ' ');
        line += row[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
  };

  std::string out = emit_row(headers);
  std::string rule;
  for (std::size_t c = 0; c < widths.size(); ++c) {
    if (c != 0) rule += "  ";
    rule += std::string(widths[c], '-');
  }
  out += rule + "\n";
  for (const auto& row : cells) out += emit_row(row);
  return out;
}

}  // namespace

std::string render_report(const Report& report, ReportFormat format) {
  if (report.rows.empty()) {
    throw Error(Errc::empty_batch, "report has no rows");
  }
  switch (format) {
    case ReportFormat::json: return render_json(report);
    case ReportFormat::csv: return render_csv(report);
    case ReportFormat::text_table: return render_text(report);
  }
  throw Error(Errc::config, "invalid report format value");
}

}  // namespace fsumm
