// fsumm: few-shot code-summarization evaluation pipeline.
//
// Subcommands compose the pipeline stages so each is independently
// runnable and resumable: ingest, sample, run, sweep-shots, score,
// compare, record-fixtures.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsumm/client.hpp"
#include "fsumm/config.hpp"
#include "fsumm/corpus.hpp"
#include "fsumm/errors.hpp"
#include "fsumm/metrics.hpp"
#include "fsumm/postproc.hpp"
#include "fsumm/runner.hpp"
#include "fsumm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag values that override the config file. Only flags the user actually
// passed win; absent flags leave the config untouched.
struct RunOverrides {
  std::optional<std::string> train, test, pool, timestamps;
  std::optional<std::string> language;
  std::optional<std::size_t> shots;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<bool> resample_per_query;
  std::optional<std::string> backend_mode;
  std::optional<std::string> fixture;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> budget_policy;
  std::optional<std::string> out;
  bool server_stop = false;
};

void add_run_flags(CLI::App* cmd, std::string& config_path,
                   RunOverrides& ov) {
  cmd->add_option("--config", config_path, "Run config JSON file");
  cmd->add_option("--train", ov.train, "Training corpus (exemplar pool)");
  cmd->add_option("--test", ov.test, "Test corpus (queries)");
  cmd->add_option("--pool", ov.pool, "Same-project exemplar pool corpus");
  cmd->add_option("--timestamps", ov.timestamps,
                  "id<TAB>ISO-8601 timestamp table");
  cmd->add_option("--language", ov.language,
                  "java|python|ruby|javascript|go|php");
  cmd->add_option("--shots", ov.shots, "Number of exemplars in the prompt");
  cmd->add_option("--strategy", ov.strategy,
                  "cross_project_random|same_project_temporal");
  cmd->add_option("--seed", ov.seed, "Selection seed");
  cmd->add_flag("--resample-per-query", [&ov](std::int64_t) {
    ov.resample_per_query = true;
  }, "Redraw cross-project exemplars per query");
  cmd->add_option("--backend-mode", ov.backend_mode, "live|record|replay");
  cmd->add_option("--fixture", ov.fixture, "Completion fixture JSONL");
  cmd->add_option("--endpoint", ov.endpoint, "Completions endpoint URL");
  cmd->add_option("--model", ov.model, "Model name sent to the backend");
  cmd->add_option("--budget-policy", ov.budget_policy,
                  "error|drop_oldest_first");
  cmd->add_flag("--server-stop", ov.server_stop,
                "Also send the close marker as a server-side stop sequence");
  cmd->add_option("--out", ov.out,
                  "Output directory (relative to the working directory)");
}

fsumm::RunConfig assemble_config(const std::string& config_path,
                                 const RunOverrides& ov) {
  fsumm::RunConfig cfg;
  if (!config_path.empty()) {
    cfg = fsumm::load_run_config(config_path);
  }
  if (ov.train) cfg.corpus.train = *ov.train;
  if (ov.test) cfg.corpus.test = *ov.test;
  if (ov.pool) cfg.corpus.pool = *ov.pool;
  if (ov.timestamps) cfg.corpus.timestamps = *ov.timestamps;
  if (ov.language) cfg.language = fsumm::parse_language(*ov.language);
  if (ov.shots) cfg.shots.n_shots = *ov.shots;
  if (ov.strategy) cfg.shots.strategy = fsumm::parse_strategy(*ov.strategy);
  if (ov.seed) cfg.shots.seed = *ov.seed;
  if (ov.resample_per_query) cfg.shots.resample_per_query = true;
  if (ov.backend_mode) {
    cfg.backend.mode = fsumm::parse_backend_mode(*ov.backend_mode);
  }
  if (ov.fixture) cfg.backend.fixture_path = *ov.fixture;
  if (ov.endpoint) cfg.backend.endpoint = *ov.endpoint;
  if (ov.model) cfg.backend.model = *ov.model;
  if (ov.budget_policy) {
    cfg.prompt.budget_policy = fsumm::parse_budget_policy(*ov.budget_policy);
  }
  if (ov.server_stop) cfg.generation.stop = {cfg.prompt.close_marker};
  if (ov.out) cfg.out_dir = *ov.out;

  if (cfg.backend.endpoint.empty()) {
    if (const char* env = std::getenv("FSUMM_ENDPOINT")) {
      cfg.backend.endpoint = env;
    }
  }
  if (const char* key = std::getenv("FSUMM_API_KEY")) {
    cfg.backend.api_key = key;
  }
  return cfg;
}

void report_run(const fsumm::RunOutcome& outcome) {
  if (outcome.score) {
    std::printf("scored %zu/%zu queries, mean BLEU-4 %.2f\n",
                outcome.score->n, outcome.n_queries,
                outcome.score->mean_bleu);
  } else {
    std::printf("scored 0/%zu queries\n", outcome.n_queries);
  }
  std::printf("artifacts: %s\n", outcome.out_dir.string().c_str());
}

int finish_run(const fsumm::RunOutcome& outcome) {
  report_run(outcome);
  if (const fsumm::QueryFailure* f = outcome.first_failure()) {
    std::fprintf(stderr, "run is partial: %zu queries failed; first: %s\n",
                 outcome.failures.size(), f->message.c_str());
    return f->exit_code;
  }
  return 0;
}

int cmd_ingest(const std::string& corpus_path, const std::string& split,
               const std::string& language, const std::string& timestamps,
               bool lenient, const std::string& out) {
  fsumm::LoadOptions options;
  options.lenient = lenient;
  fsumm::Corpus corpus =
      fsumm::load_jsonl(corpus_path, fsumm::parse_split(split),
                        fsumm::parse_language(language), options);
  if (!timestamps.empty()) {
    corpus = fsumm::attach_timestamps(
        corpus, fsumm::load_timestamp_table(timestamps));
  }
  if (!out.empty()) {
    fsumm::save_jsonl(corpus, out);
  }
  std::printf("samples: %zu\ncorpus_hash: %s\n", corpus.size(),
              fsumm::corpus_content_hash(corpus).c_str());
  return 0;
}

int cmd_sample(const std::string& corpus_path, const std::string& split,
               const std::string& language, std::size_t size,
               std::uint64_t seed, const std::string& out) {
  const fsumm::Corpus corpus = fsumm::load_jsonl(
      corpus_path, fsumm::parse_split(split), fsumm::parse_language(language));
  const fsumm::Corpus subset = fsumm::sample_test_subset(corpus, size, seed);
  fsumm::save_jsonl(subset, out);
  std::printf("sampled %zu of %zu\ncorpus_hash: %s\n", subset.size(),
              corpus.size(), fsumm::corpus_content_hash(subset).c_str());
  return 0;
}

int cmd_score(const std::string& corpus_path, const std::string& language,
              const std::string& candidates_path, const std::string& out) {
  const fsumm::Corpus corpus =
      fsumm::load_jsonl(corpus_path, fsumm::Split::test,
                        fsumm::parse_language(language));

  std::ifstream in(candidates_path);
  if (!in) {
    throw fsumm::Error(fsumm::Errc::io,
                       "cannot open candidates file: " + candidates_path);
  }
  std::string config_digest = "unknown";
  std::vector<fsumm::ScoredPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw fsumm::MalformedLineError(line_no, e.what());
    }
    if (line_no == 1 && j.contains("artifact")) {
      config_digest = j.value("config_hash", config_digest);
      continue;
    }
    try {
      const auto id = j.at("query_id").get<std::string>();
      const fsumm::CodeSample* sample = corpus.find(id);
      if (!sample) {
        throw fsumm::Error(fsumm::Errc::unknown_id,
                           "candidate " + id + " not in corpus");
      }
      pairs.push_back(fsumm::ScoredPair{
          id, fsumm::tokenize_for_eval(j.at("clipped").get<std::string>()),
          sample->summary_tokens});
    } catch (const json::exception& e) {
      throw fsumm::MalformedLineError(line_no, e.what());
    }
  }

  const fsumm::CorpusScore score = fsumm::corpus_score(pairs);
  if (!out.empty()) {
    fs::create_directories(fs::path(out).parent_path().empty()
                               ? "."
                               : fs::path(out).parent_path());
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) {
      throw fsumm::Error(fsumm::Errc::io, "cannot write " + out);
    }
    json header;
    header["artifact"] = "scores";
    header["config_hash"] = config_digest;
    os << header.dump() << "\n";
    for (const auto& [id, b] : score.per_sample) {
      json l;
      l["id"] = id;
      l["bleu"] = b.value;
      l["p1"] = b.precisions[0];
      l["p2"] = b.precisions[1];
      l["p3"] = b.precisions[2];
      l["p4"] = b.precisions[3];
      l["bp"] = b.brevity_penalty;
      os << l.dump() << "\n";
    }
  }
  std::printf("scored %zu candidates, mean BLEU-4 %.2f\n", score.n,
              score.mean_bleu);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot code summarization evaluation pipeline"};
  app.set_version_flag("--version", fsumm::kVersion);
  app.require_subcommand(1);

  // ---- ingest ----
  auto* ingest = app.add_subcommand(
      "ingest", "Validate and normalize a JSONL corpus");
  std::string in_corpus, in_split = "test", in_language = "java";
  std::string in_timestamps, in_out;
  bool in_lenient = false;
  ingest->add_option("--corpus", in_corpus, "Corpus JSONL")->required();
  ingest->add_option("--split", in_split, "train|test");
  ingest->add_option("--language", in_language, "Corpus language");
  ingest->add_option("--timestamps", in_timestamps, "Timestamp table to attach");
  ingest->add_flag("--lenient", in_lenient,
                   "Recover docstring_tokens from docstring when missing");
  ingest->add_option("--out", in_out, "Write the normalized corpus here");

  // ---- sample ----
  auto* sample = app.add_subcommand(
      "sample", "Draw a deterministic test subset");
  std::string sa_corpus, sa_split = "test", sa_language = "java", sa_out;
  std::size_t sa_size = 1000;
  std::uint64_t sa_seed = 0;
  sample->add_option("--corpus", sa_corpus, "Corpus JSONL")->required();
  sample->add_option("--split", sa_split, "train|test");
  sample->add_option("--language", sa_language, "Corpus language");
  sample->add_option("--size", sa_size, "Subset size");
  sample->add_option("--seed", sa_seed, "Draw seed");
  sample->add_option("--out", sa_out, "Subset output path")->required();

  // ---- run ----
  auto* run = app.add_subcommand("run", "Execute the full pipeline once");
  std::string run_config;
  RunOverrides run_ov;
  fsumm::RunOptions run_opts;
  add_run_flags(run, run_config, run_ov);
  run->add_option("--concurrency", run_opts.concurrency,
                  "Parallel completion requests");
  run->add_flag("--fail-fast", run_opts.fail_fast,
                "Abort on the first failure instead of isolating it");

  // ---- sweep-shots ----
  auto* sweep = app.add_subcommand(
      "sweep-shots", "Run the pipeline once per shot count");
  std::string sw_config;
  RunOverrides sw_ov;
  fsumm::RunOptions sw_opts;
  std::vector<std::size_t> sw_shots;
  add_run_flags(sweep, sw_config, sw_ov);
  sweep->add_option("counts", sw_shots, "Shot counts to sweep")->required();
  sweep->add_option("--concurrency", sw_opts.concurrency,
                    "Parallel completion requests");
  sweep->add_flag("--fail-fast", sw_opts.fail_fast,
                  "Abort a shot's run on its first failure");

  // ---- score ----
  auto* score = app.add_subcommand(
      "score", "Score a candidates file against reference summaries");
  std::string sc_corpus, sc_language = "java", sc_candidates, sc_out;
  score->add_option("--corpus", sc_corpus, "Reference corpus JSONL")
      ->required();
  score->add_option("--language", sc_language, "Corpus language");
  score->add_option("--candidates", sc_candidates, "candidates.jsonl")
      ->required();
  score->add_option("--out", sc_out, "Write scores.jsonl here");

  // ---- compare ----
  auto* compare = app.add_subcommand(
      "compare", "Compare two finished runs (A = baseline, B = treatment)");
  std::string cp_a, cp_b, cp_out = "comparison";
  fsumm::CompareOptions cp_opts;
  compare->add_option("run_a", cp_a, "Baseline run directory")->required();
  compare->add_option("run_b", cp_b, "Treatment run directory")->required();
  compare->add_option("--out", cp_out, "Report output directory");
  compare->add_option("--label-a", cp_opts.label_a, "Baseline column label");
  compare->add_option("--label-b", cp_opts.label_b, "Treatment column label");
  compare->add_option("--scope", cp_opts.scope,
                      "Row scope (defaults to the runs' language)");

  // ---- record-fixtures ----
  auto* record = app.add_subcommand(
      "record-fixtures",
      "Run the pipeline in record mode, filling the fixture store");
  std::string rec_config;
  RunOverrides rec_ov;
  fsumm::RunOptions rec_opts;
  add_run_flags(record, rec_config, rec_ov);
  record->add_option("--concurrency", rec_opts.concurrency,
                     "Parallel completion requests");
  record->add_flag("--fail-fast", rec_opts.fail_fast,
                   "Abort on the first failure instead of isolating it");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      return cmd_ingest(in_corpus, in_split, in_language, in_timestamps,
                        in_lenient, in_out);
    }
    if (*sample) {
      return cmd_sample(sa_corpus, sa_split, sa_language, sa_size, sa_seed,
                        sa_out);
    }
    if (*run) {
      const fsumm::RunConfig cfg = assemble_config(run_config, run_ov);
      return finish_run(fsumm::run_pipeline(cfg, run_opts));
    }
    if (*sweep) {
      const fsumm::RunConfig cfg = assemble_config(sw_config, sw_ov);
      const fsumm::SweepOutcome outcome =
          fsumm::sweep_shots(cfg, sw_shots, sw_opts);
      for (const std::string& w : outcome.warnings) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      }
      int exit_code = 0;
      for (const fsumm::SweepRow& row : outcome.rows) {
        if (row.mean_bleu) {
          std::printf("shots=%zu mean BLEU-4 %.2f (n=%zu)\n", row.shots,
                      *row.mean_bleu, row.n);
        }
        if (row.error) {
          std::fprintf(stderr, "shots=%zu failed: %s\n", row.shots,
                       row.error->message.c_str());
          if (exit_code == 0) exit_code = row.error->exit_code;
        }
      }
      std::printf("artifacts: %s\n", outcome.out_dir.string().c_str());
      return exit_code;
    }
    if (*score) {
      return cmd_score(sc_corpus, sc_language, sc_candidates, sc_out);
    }
    if (*compare) {
      const fsumm::Report report =
          fsumm::compare_runs(cp_a, cp_b, cp_out, cp_opts);
      std::fputs(
          fsumm::render_report(report, fsumm::ReportFormat::text_table)
              .c_str(),
          stdout);
      std::printf("reports: %s\n", cp_out.c_str());
      return 0;
    }
    if (*record) {
      fsumm::RunConfig cfg = assemble_config(rec_config, rec_ov);
      cfg.backend.mode = fsumm::BackendMode::record;
      return finish_run(fsumm::run_pipeline(cfg, rec_opts));
    }
  } catch (const fsumm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
