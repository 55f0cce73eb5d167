#pragma once

#include <string>

#include "fsumm/client.hpp"
#include "fsumm/corpus.hpp"
#include "fsumm/prompt.hpp"
#include "fsumm/select.hpp"

namespace fsumm {

struct CorpusPaths {
  std::string train;       // exemplar pool for cross-project selection
  std::string test;        // query corpus
  std::string pool;        // same-project exemplar pool; empty = query corpus
  std::string timestamps;  // optional id<TAB>ISO-8601 table
};

struct PromptOptions {
  std::string open_marker = "<s>";
  std::string close_marker = "</s>";
  std::size_t token_budget = 4000;
  BudgetPolicy budget_policy = BudgetPolicy::error;
};

struct RunConfig {
  CorpusPaths corpus;
  Language language = Language::java;
  ShotConfig shots;
  GenerationParams generation;
  PromptOptions prompt;
  BackendConfig backend;
  std::string out_dir = "out";
};

// Parses the JSON run config documented in docs/config.md. Relative paths
// (including out_dir) resolve against the config file's directory; unknown
// keys are rejected so typos fail loudly. Credentials never live in the
// file: an api_key key is a config error, FSUMM_API_KEY is the only source.
RunConfig load_run_config(const std::string& path);

// The semantic portion of the config: everything that changes what a run
// computes, nothing about where files live or how fast requests go. Two
// runs with equal semantic JSON and equal corpus hashes are replays of the
// same experiment.
std::string semantic_config_json(const RunConfig& cfg);

// SHA-256 of semantic_config_json, embedded in every run artifact.
std::string config_hash(const RunConfig& cfg);

}  // namespace fsumm
