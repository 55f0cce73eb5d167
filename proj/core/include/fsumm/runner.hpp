#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsumm/config.hpp"
#include "fsumm/metrics.hpp"
#include "fsumm/report.hpp"

namespace fsumm {

struct RunOptions {
  std::size_t concurrency = 1;  // completion requests only
  bool fail_fast = false;       // abort on the first per-query failure
};

struct QueryFailure {
  std::string message;
  int exit_code = 3;
};

struct RunOutcome {
  std::filesystem::path out_dir;
  std::string config_digest;
  std::string corpus_digest;
  std::optional<CorpusScore> score;  // absent when nothing was scored
  std::size_t n_queries = 0;
  std::map<std::string, QueryFailure> failures;  // query id -> first failure
  std::vector<std::string> warnings;

  bool partial() const { return !failures.empty(); }
  // Deterministic representative failure (smallest query id).
  const QueryFailure* first_failure() const;
};

// Full pipeline: load -> select -> render -> complete -> clip -> score,
// then write prompts.jsonl, candidates.jsonl, scores.jsonl, summary.json,
// and provenance.json under cfg.out_dir (atomic temp+rename). Per-query
// failures are isolated unless opts.fail_fast; corpus/config-level
// problems throw.
RunOutcome run_pipeline(const RunConfig& cfg, const RunOptions& opts);

struct SweepRow {
  std::size_t shots = 0;
  std::optional<double> mean_bleu;  // absent when this shot count failed
  std::size_t n = 0;                // queries scored
  std::optional<QueryFailure> error;
};

struct SweepOutcome {
  std::filesystem::path out_dir;
  std::vector<SweepRow> rows;  // in post-dedup request order
  std::vector<std::string> warnings;
};

// One run per distinct shot count (duplicates dropped with a warning),
// shared seed and artifacts under <out_dir>/shots-<n>/, plus sweep.csv and
// sweep.json at the top. Per-shot failures are isolated into their rows.
SweepOutcome sweep_shots(const RunConfig& cfg,
                         const std::vector<std::size_t>& shot_counts,
                         const RunOptions& opts);

struct CompareOptions {
  std::string label_a = "baseline";
  std::string label_b = "treatment";
  std::string scope;  // defaults to the runs' language
};

// Loads two finished run directories, refuses mismatched corpus hashes or
// sample id sets (Errc::id_set_mismatch), and writes report.json,
// report.csv, and report.txt under out_dir.
Report compare_runs(const std::filesystem::path& dir_a,
                    const std::filesystem::path& dir_b,
                    const std::filesystem::path& out_dir,
                    const CompareOptions& opts);

}  // namespace fsumm
