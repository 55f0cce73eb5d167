#include "fsumm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "fsumm/client.hpp"
#include "fsumm/errors.hpp"
#include "fsumm/postproc.hpp"
#include "fsumm/timestamp.hpp"
#include "fsumm/version.hpp"

namespace fsumm {

namespace fs = std::filesystem;
using nlohmann::json;

const QueryFailure* RunOutcome::first_failure() const {
  return failures.empty() ? nullptr : &failures.begin()->second;
}

namespace {

void write_atomic(const fs::path& file, const std::string& content) {
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::io, "cannot write " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error(Errc::io, "write failed on " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) {
    throw Error(Errc::io,
                "cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::string artifact_header(const std::string& name,
                            const std::string& config_digest) {
  json h;
  h["artifact"] = name;
  h["config_hash"] = config_digest;
  return h.dump() + "\n";
}

// Applies only the table rows whose ids exist in this corpus; a shared
// timestamp table may legitimately cover more than one corpus.
Corpus attach_known_timestamps(const Corpus& corpus,
                               const TimestampTable& table) {
  TimestampTable known;
  for (const CodeSample& s : corpus.samples) {
    const auto it = table.find(s.id);
    if (it != table.end()) known.insert(*it);
  }
  if (known.empty()) return corpus;
  return attach_timestamps(corpus, known);
}

json params_json(const GenerationParams& p) {
  json j;
  j["max_tokens"] = p.max_tokens;
  j["stop"] = p.stop;
  j["temperature"] = p.temperature;
  j["top_p"] = p.top_p;
  return j;
}

struct PreparedQuery {
  const CodeSample* query = nullptr;
  FittedPrompt fitted;
};

}  // namespace

RunOutcome run_pipeline(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.concurrency == 0) {
    throw Error(Errc::config, "concurrency must be at least 1");
  }
  cfg.generation.validate();
  if (cfg.corpus.test.empty()) {
    throw Error(Errc::config, "corpus.test is required");
  }

  RunOutcome outcome;
  outcome.out_dir = cfg.out_dir;
  outcome.config_digest = config_hash(cfg);

  const Corpus test = [&] {
    Corpus c = load_jsonl(cfg.corpus.test, Split::test, cfg.language);
    if (!cfg.corpus.timestamps.empty()) {
      c = attach_known_timestamps(c, load_timestamp_table(cfg.corpus.timestamps));
    }
    return c;
  }();
  outcome.corpus_digest = corpus_content_hash(test);
  outcome.n_queries = test.size();

  const bool cross = cfg.shots.strategy == Strategy::cross_project_random;

  Corpus train;
  if (cross && cfg.shots.n_shots > 0) {
    if (cfg.corpus.train.empty()) {
      throw Error(Errc::config,
                  "cross-project selection needs corpus.train");
    }
    train = load_jsonl(cfg.corpus.train, Split::train, cfg.language);
  }

  Corpus pool;
  if (!cross) {
    if (cfg.corpus.pool.empty()) {
      pool = test;
    } else {
      pool = load_jsonl(cfg.corpus.pool, Split::test, cfg.language);
      if (!cfg.corpus.timestamps.empty()) {
        pool = attach_known_timestamps(
            pool, load_timestamp_table(cfg.corpus.timestamps));
      }
    }
  }

  // Cross-project selection draws one exemplar set per run and reuses it
  // for every query; per-query resampling is the opt-in variant.
  std::optional<ExemplarSet> shared;
  if (cross && !cfg.shots.resample_per_query) {
    shared = select_cross_project(train, cfg.shots);
  }

  const PromptSpec pspec{cfg.prompt.open_marker, cfg.prompt.close_marker,
                         cfg.prompt.token_budget};

  std::vector<PreparedQuery> prepared;
  prepared.reserve(test.size());
  for (const CodeSample& query : test.samples) {
    try {
      ExemplarSet shots;
      if (cross) {
        if (shared) {
          shots = *shared;
        } else {
          ShotConfig per_query = cfg.shots;
          per_query.seed = per_query_seed(cfg.shots.seed, query.id);
          shots = select_cross_project(train, per_query);
        }
        shots.query_id = query.id;
      } else {
        shots = select_same_project(pool, query, cfg.shots);
      }
      PreparedQuery pq;
      pq.query = &query;
      pq.fitted =
          fit_to_budget(shots, query, pspec, cfg.prompt.budget_policy);
      prepared.push_back(std::move(pq));
    } catch (const Error& e) {
      if (opts.fail_fast) throw;
      outcome.failures[query.id] = QueryFailure{e.what(), e.exit_code()};
    }
  }

  Backend backend(cfg.backend);
  std::vector<BatchItem> items;
  items.reserve(prepared.size());
  for (const PreparedQuery& pq : prepared) {
    items.push_back(BatchItem{pq.query->id, pq.fitted.prompt.text});
  }
  BatchResult batch =
      backend.run_batch(items, cfg.generation, opts.concurrency,
                        opts.fail_fast);
  for (const auto& [id, err] : batch.errors) {
    outcome.failures[id] = QueryFailure{err.message, err.exit_code};
  }

  std::vector<CandidateSummary> candidates;
  std::vector<ScoredPair> pairs;
  candidates.reserve(batch.completions.size());
  for (const PreparedQuery& pq : prepared) {
    const auto done = batch.completions.find(pq.query->id);
    if (done == batch.completions.end()) continue;
    try {
      CandidateSummary cand =
          make_candidate(pq.query->id, done->second, cfg.prompt.close_marker);
      pairs.push_back(
          ScoredPair{cand.query_id, cand.tokens, pq.query->summary_tokens});
      candidates.push_back(std::move(cand));
    } catch (const Error& e) {
      if (opts.fail_fast) throw;
      outcome.failures[pq.query->id] = QueryFailure{e.what(), e.exit_code()};
    }
  }

  if (!pairs.empty()) {
    outcome.score = corpus_score(pairs);
  }

  // --- artifacts ---
  fs::create_directories(outcome.out_dir);

  std::string prompts_doc =
      artifact_header("prompts", outcome.config_digest);
  for (const PreparedQuery& pq : prepared) {
    json line;
    line["id"] = pq.query->id;
    line["text"] = pq.fitted.prompt.text;
    line["estimated_tokens"] = pq.fitted.prompt.estimated_tokens;
    line["exemplar_ids"] = pq.fitted.prompt.exemplar_ids;
    prompts_doc += line.dump() + "\n";
  }
  write_atomic(outcome.out_dir / "prompts.jsonl", prompts_doc);

  std::string cands_doc =
      artifact_header("candidates", outcome.config_digest);
  for (const CandidateSummary& cand : candidates) {
    json line;
    line["query_id"] = cand.query_id;
    line["raw"] = cand.raw;
    line["clipped"] = cand.clipped;
    cands_doc += line.dump() + "\n";
  }
  write_atomic(outcome.out_dir / "candidates.jsonl", cands_doc);

  std::string scores_doc = artifact_header("scores", outcome.config_digest);
  if (outcome.score) {
    for (const auto& [id, b] : outcome.score->per_sample) {
      json line;
      line["id"] = id;
      line["bleu"] = b.value;
      line["p1"] = b.precisions[0];
      line["p2"] = b.precisions[1];
      line["p3"] = b.precisions[2];
      line["p4"] = b.precisions[3];
      line["bp"] = b.brevity_penalty;
      scores_doc += line.dump() + "\n";
    }
  }
  write_atomic(outcome.out_dir / "scores.jsonl", scores_doc);

  json summary;
  summary["artifact"] = "summary";
  summary["backend"]["mode"] = to_string(cfg.backend.mode);
  summary["backend"]["model"] = cfg.backend.model;
  summary["config_hash"] = outcome.config_digest;
  summary["corpus_hash"] = outcome.corpus_digest;
  summary["generation"] = params_json(cfg.generation);
  summary["language"] = std::string(to_string(cfg.language));
  if (outcome.score) {
    summary["mean_bleu"] = outcome.score->mean_bleu;
    summary["n_scored"] = outcome.score->n;
  } else {
    summary["mean_bleu"] = nullptr;
    summary["n_scored"] = 0;
  }
  summary["n_failed"] = outcome.failures.size();
  summary["n_queries"] = outcome.n_queries;
  summary["partial"] = outcome.partial();
  summary["prompt"]["budget_policy"] =
      std::string(to_string(cfg.prompt.budget_policy));
  summary["prompt"]["close_marker"] = cfg.prompt.close_marker;
  summary["prompt"]["open_marker"] = cfg.prompt.open_marker;
  summary["prompt"]["token_budget"] = cfg.prompt.token_budget;
  summary["shots"]["n"] = cfg.shots.n_shots;
  summary["shots"]["resample_per_query"] = cfg.shots.resample_per_query;
  summary["shots"]["seed"] = cfg.shots.seed;
  summary["shots"]["strategy"] = std::string(to_string(cfg.shots.strategy));
  write_atomic(outcome.out_dir / "summary.json", summary.dump(2) + "\n");

  json prov;
  prov["artifact"] = "provenance";
  prov["backend"]["endpoint"] = cfg.backend.endpoint;
  prov["backend"]["fixture"] = cfg.backend.fixture_path;
  prov["backend"]["mode"] = to_string(cfg.backend.mode);
  prov["backend"]["model"] = cfg.backend.model;
  prov["concurrency"] = opts.concurrency;
  prov["config_hash"] = outcome.config_digest;
  prov["corpus_hash"] = outcome.corpus_digest;
  prov["created_at"] = format_iso8601_utc(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  json dropped = json::object();
  for (const PreparedQuery& pq : prepared) {
    if (!pq.fitted.dropped_ids.empty()) {
      dropped[pq.query->id] = pq.fitted.dropped_ids;
    }
  }
  prov["dropped_exemplars"] = std::move(dropped);
  json errors = json::object();
  for (const auto& [id, f] : outcome.failures) {
    errors[id] = {{"exit_code", f.exit_code}, {"message", f.message}};
  }
  prov["errors"] = std::move(errors);
  prov["fail_fast"] = opts.fail_fast;
  prov["paths"]["pool"] = cfg.corpus.pool;
  prov["paths"]["test"] = cfg.corpus.test;
  prov["paths"]["timestamps"] = cfg.corpus.timestamps;
  prov["paths"]["train"] = cfg.corpus.train;
  prov["tool_version"] = kVersion;
  prov["warnings"] = outcome.warnings;
  write_atomic(outcome.out_dir / "provenance.json", prov.dump(2) + "\n");

  return outcome;
}

SweepOutcome sweep_shots(const RunConfig& cfg,
                         const std::vector<std::size_t>& shot_counts,
                         const RunOptions& opts) {
  if (shot_counts.empty()) {
    throw Error(Errc::config, "sweep needs at least one shot count");
  }

  SweepOutcome sweep;
  sweep.out_dir = cfg.out_dir;

  std::vector<std::size_t> distinct;
  for (std::size_t s : shot_counts) {
    if (std::find(distinct.begin(), distinct.end(), s) != distinct.end()) {
      sweep.warnings.push_back("duplicate shot count " + std::to_string(s) +
                               " ignored");
      continue;
    }
    distinct.push_back(s);
  }

  for (std::size_t s : distinct) {
    RunConfig sub = cfg;
    sub.shots.n_shots = s;
    sub.out_dir =
        (fs::path(cfg.out_dir) / ("shots-" + std::to_string(s))).string();
    SweepRow row;
    row.shots = s;
    try {
      const RunOutcome out = run_pipeline(sub, opts);
      if (out.score) {
        row.mean_bleu = out.score->mean_bleu;
        row.n = out.score->n;
      }
      if (const QueryFailure* f = out.first_failure()) {
        row.error = *f;
      }
    } catch (const Error& e) {
      row.error = QueryFailure{e.what(), e.exit_code()};
    }
    sweep.rows.push_back(std::move(row));
  }

  fs::create_directories(sweep.out_dir);
  const std::string digest = config_hash(cfg);

  std::string csv = "shots,mean_bleu,n\n";
  for (const SweepRow& row : sweep.rows) {
    if (!row.mean_bleu) continue;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.2f,%zu\n", row.shots,
                  *row.mean_bleu, row.n);
    csv += buf;
  }
  write_atomic(sweep.out_dir / "sweep.csv", csv);

  json doc;
  doc["artifact"] = "sweep";
  doc["config_hash"] = digest;  // base config; per-run hashes in subdirs
  json rows = json::array();
  for (const SweepRow& row : sweep.rows) {
    json r;
    r["shots"] = row.shots;
    if (row.mean_bleu) {
      r["mean_bleu"] = *row.mean_bleu;
    } else {
      r["mean_bleu"] = nullptr;
    }
    r["n"] = row.n;
    if (row.error) {
      r["error"] = {{"exit_code", row.error->exit_code},
                    {"message", row.error->message}};
    } else {
      r["error"] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  doc["warnings"] = sweep.warnings;
  write_atomic(sweep.out_dir / "sweep.json", doc.dump(2) + "\n");

  return sweep;
}

namespace {

struct LoadedRun {
  std::string config_digest;
  std::string corpus_digest;
  std::string language;
  CorpusScore score;
};

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(Errc::io, "cannot open " + file.string());
  }
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line,
                file.string() + " is not valid JSON: " + e.what());
  }
}

LoadedRun load_run_dir(const fs::path& dir) {
  LoadedRun run;
  const json summary = read_json_file(dir / "summary.json");
  try {
    run.config_digest = summary.at("config_hash").get<std::string>();
    run.corpus_digest = summary.at("corpus_hash").get<std::string>();
    run.language = summary.at("language").get<std::string>();
    if (!summary.at("mean_bleu").is_null()) {
      run.score.mean_bleu = summary.at("mean_bleu").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line,
                (dir / "summary.json").string() +
                    " has unexpected structure: " + e.what());
  }

  const fs::path scores_file = dir / "scores.jsonl";
  std::ifstream in(scores_file);
  if (!in) {
    throw Error(Errc::io, "cannot open " + scores_file.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedLineError(line_no, scores_file.string() + ": " + e.what());
    }
    if (line_no == 1 && j.contains("artifact")) continue;  // header line
    try {
      BleuScore b;
      b.value = j.at("bleu").get<double>();
      b.precisions = {j.at("p1").get<double>(), j.at("p2").get<double>(),
                      j.at("p3").get<double>(), j.at("p4").get<double>()};
      b.brevity_penalty = j.at("bp").get<double>();
      run.score.per_sample[j.at("id").get<std::string>()] = b;
    } catch (const json::exception& e) {
      throw MalformedLineError(line_no, scores_file.string() + ": " + e.what());
    }
  }
  run.score.n = run.score.per_sample.size();
  return run;
}

}  // namespace

Report compare_runs(const fs::path& dir_a, const fs::path& dir_b,
                    const fs::path& out_dir, const CompareOptions& opts) {
  const LoadedRun a = load_run_dir(dir_a);
  const LoadedRun b = load_run_dir(dir_b);

  if (a.corpus_digest != b.corpus_digest) {
    throw Error(Errc::id_set_mismatch,
                "runs were made on different corpora (corpus hashes differ)");
  }
  if (a.language != b.language) {
    throw Error(Errc::id_set_mismatch, "runs disagree on language (" +
                                           a.language + " vs " + b.language +
                                           ")");
  }

  Report report;
  report.label_a = opts.label_a;
  report.label_b = opts.label_b;
  const std::string scope = opts.scope.empty() ? a.language : opts.scope;
  report.rows.push_back(build_comparison(a.score, b.score, scope));

  fs::create_directories(out_dir);

  json doc = json::parse(render_report(report, ReportFormat::json));
  doc["config_hash_a"] = a.config_digest;
  doc["config_hash_b"] = b.config_digest;
  doc["corpus_hash"] = a.corpus_digest;
  write_atomic(out_dir / "report.json", doc.dump(2) + "\n");

  const std::string stamp = "# config_hash_a=" + a.config_digest +
                            " config_hash_b=" + b.config_digest +
                            " corpus_hash=" + a.corpus_digest + "\n";
  write_atomic(out_dir / "report.csv",
               stamp + render_report(report, ReportFormat::csv));
  write_atomic(out_dir / "report.txt",
               stamp + render_report(report, ReportFormat::text_table));

  return report;
}

}  // namespace fsumm
