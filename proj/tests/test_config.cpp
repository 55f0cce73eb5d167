#include <doctest.h>

#include <chrono>
#include <string>
#include <vector>

#include "fsumm/config.hpp"
#include "fsumm/errors.hpp"
#include "testutil.hpp"

using namespace fsumm;

namespace {

std::string full_config_json() {
  return R"({
  "corpus": {
    "train": "data/train.jsonl",
    "test": "data/test.jsonl",
    "pool": "data/pool.jsonl",
    "timestamps": "data/times.tsv"
  },
  "language": "python",
  "shots": {
    "n": 5,
    "strategy": "same_project_temporal",
    "seed": 99,
    "resample_per_query": true
  },
  "generation": {
    "temperature": 0.5,
    "top_p": 0.9,
    "max_tokens": 64,
    "stop": ["\n\n"]
  },
  "prompt": {
    "open_marker": "<sum>",
    "close_marker": "</sum>",
    "token_budget": 2048,
    "budget_policy": "drop_oldest_first"
  },
  "backend": {
    "mode": "record",
    "endpoint": "https://api.example.test/v1/completions",
    "model": "test-model",
    "fixture": "fixtures/completions.jsonl",
    "rate_limit": {"max_requests": 5, "window_seconds": 10},
    "max_attempts": 4,
    "initial_backoff_ms": 250
  },
  "out_dir": "results/run1"
})";
}

}  // namespace

TEST_CASE("load_run_config reads every documented key") {
  testutil::TempDir dir;
  const std::string path = dir / "run.json";
  testutil::spit(path, full_config_json());

  const RunConfig cfg = load_run_config(path);
  const std::string base = dir.path().string();

  CHECK(cfg.corpus.train == base + "/data/train.jsonl");
  CHECK(cfg.corpus.test == base + "/data/test.jsonl");
  CHECK(cfg.corpus.pool == base + "/data/pool.jsonl");
  CHECK(cfg.corpus.timestamps == base + "/data/times.tsv");
  CHECK(cfg.language == Language::python);
  CHECK(cfg.shots.n_shots == 5);
  CHECK(cfg.shots.strategy == Strategy::same_project_temporal);
  CHECK(cfg.shots.seed == 99);
  CHECK(cfg.shots.resample_per_query);
  CHECK(cfg.generation.temperature == 0.5);
  CHECK(cfg.generation.top_p == 0.9);
  CHECK(cfg.generation.max_tokens == 64);
  REQUIRE(cfg.generation.stop.size() == 1);
  CHECK(cfg.generation.stop[0] == "\n\n");
  CHECK(cfg.prompt.open_marker == "<sum>");
  CHECK(cfg.prompt.close_marker == "</sum>");
  CHECK(cfg.prompt.token_budget == 2048);
  CHECK(cfg.prompt.budget_policy == BudgetPolicy::drop_oldest_first);
  CHECK(cfg.backend.mode == BackendMode::record);
  CHECK(cfg.backend.endpoint == "https://api.example.test/v1/completions");
  CHECK(cfg.backend.model == "test-model");
  CHECK(cfg.backend.fixture_path == base + "/fixtures/completions.jsonl");
  CHECK(cfg.backend.rate_limit.max_requests == 5);
  CHECK(cfg.backend.rate_limit.window == std::chrono::seconds(10));
  CHECK(cfg.backend.max_attempts == 4);
  CHECK(cfg.backend.initial_backoff == std::chrono::milliseconds(250));
  CHECK(cfg.out_dir == base + "/results/run1");
}

TEST_CASE("empty config object yields documented defaults") {
  testutil::TempDir dir;
  const std::string path = dir / "run.json";
  testutil::spit(path, "{}");
  const RunConfig cfg = load_run_config(path);
  CHECK(cfg.language == Language::java);
  CHECK(cfg.shots.n_shots == 10);
  CHECK(cfg.shots.strategy == Strategy::cross_project_random);
  CHECK(cfg.shots.seed == 0);
  CHECK_FALSE(cfg.shots.resample_per_query);
  CHECK(cfg.generation.temperature == 0.0);
  CHECK(cfg.generation.top_p == 1.0);
  CHECK(cfg.generation.max_tokens == 50);
  CHECK(cfg.generation.stop.empty());
  CHECK(cfg.prompt.open_marker == "<s>");
  CHECK(cfg.prompt.close_marker == "</s>");
  CHECK(cfg.prompt.token_budget == 4000);
  CHECK(cfg.prompt.budget_policy == BudgetPolicy::error);
  CHECK(cfg.backend.mode == BackendMode::replay);
  CHECK(cfg.backend.model == "code-davinci-002");
  CHECK(cfg.out_dir == dir.path().string() + "/out");
}

TEST_CASE("absolute paths are left untouched") {
  testutil::TempDir dir;
  const std::string path = dir / "run.json";
  testutil::spit(path, R"({"corpus": {"test": "/abs/test.jsonl"},
                           "out_dir": "/abs/out"})");
  const RunConfig cfg = load_run_config(path);
  CHECK(cfg.corpus.test == "/abs/test.jsonl");
  CHECK(cfg.out_dir == "/abs/out");
}

TEST_CASE("api_key in a config file is rejected with the documented message") {
  testutil::TempDir dir;
  const std::string path = dir / "run.json";
  testutil::spit(path, R"({"backend": {"api_key": "sk-oops"}})");
  try {
    load_run_config(path);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
    CHECK(e.exit_code() == 2);
    CHECK(std::string(e.what()) ==
          "api_key must not appear in config files; "
          "set FSUMM_API_KEY in the environment");
  }
}

TEST_CASE("unknown keys are rejected at every level") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"root", R"({"verbose": true})"},
      {"corpus", R"({"corpus": {"trian": "x.jsonl"}})"},
      {"shots", R"({"shots": {"count": 3}})"},
      {"generation", R"({"generation": {"temp": 0.2}})"},
      {"prompt", R"({"prompt": {"open": "<s>"}})"},
      {"backend", R"({"backend": {"url": "http://x"}})"},
      {"rate_limit", R"({"backend": {"rate_limit": {"rps": 3}}})"},
  };
  for (const auto& [label, body] : cases) {
    testutil::TempDir dir;
    const std::string path = dir / "run.json";
    testutil::spit(path, body);
    CAPTURE(label);
    try {
      load_run_config(path);
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config);
      CHECK(std::string(e.what()).find("unknown config key") !=
            std::string::npos);
    }
  }
}

TEST_CASE("malformed config files are config errors") {
  testutil::TempDir dir;

  CHECK_THROWS_AS(load_run_config(dir / "absent.json"), Error);

  testutil::spit(dir / "bad.json", "{ not json");
  try {
    load_run_config(dir / "bad.json");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
  }

  testutil::spit(dir / "array.json", "[1, 2]");
  CHECK_THROWS_AS(load_run_config(dir / "array.json"), Error);

  testutil::spit(dir / "type.json", R"({"shots": {"n": "many"}})");
  try {
    load_run_config(dir / "type.json");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
    CHECK(std::string(e.what()).find("wrong type") != std::string::npos);
  }
}

TEST_CASE("range validation on backend knobs") {
  testutil::TempDir dir;
  testutil::spit(dir / "w.json",
                 R"({"backend": {"rate_limit": {"window_seconds": 0}}})");
  CHECK_THROWS_AS(load_run_config(dir / "w.json"), Error);

  testutil::spit(dir / "b.json", R"({"backend": {"initial_backoff_ms": -1}})");
  CHECK_THROWS_AS(load_run_config(dir / "b.json"), Error);

  testutil::spit(dir / "g.json", R"({"generation": {"temperature": 3.0}})");
  CHECK_THROWS_AS(load_run_config(dir / "g.json"), Error);
}

TEST_CASE("semantic config json for defaults is the frozen field list") {
  const RunConfig cfg;
  CHECK(semantic_config_json(cfg) ==
        R"({"generation":{"max_tokens":50,"stop":[],"temperature":0.0,"top_p":1.0},)"
        R"("language":"java","mode":"replay","model":"code-davinci-002",)"
        R"("prompt":{"budget_policy":"error","close_marker":"</s>","open_marker":"<s>","token_budget":4000},)"
        R"("shots":{"n":10,"resample_per_query":false,"seed":0,"strategy":"cross_project_random"}})");
  CHECK(config_hash(cfg) == config_hash(RunConfig{}));
  CHECK(config_hash(cfg).size() == 64);
}

TEST_CASE("config hash ignores operational settings") {
  RunConfig a;
  RunConfig b;
  b.corpus.train = "/somewhere/else/train.jsonl";
  b.corpus.test = "/somewhere/else/test.jsonl";
  b.corpus.timestamps = "/t.tsv";
  b.backend.endpoint = "https://other.example.test/v1/c";
  b.backend.fixture_path = "/tmp/other.jsonl";
  b.backend.rate_limit.max_requests = 3;
  b.backend.max_attempts = 9;
  b.backend.initial_backoff = std::chrono::milliseconds(1);
  b.out_dir = "/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("config hash tracks every semantic field") {
  const RunConfig base;
  const std::string h0 = config_hash(base);

  std::vector<RunConfig> variants(14, base);
  variants[0].language = Language::go;
  variants[1].shots.n_shots = 1;
  variants[2].shots.seed = 7;
  variants[3].shots.strategy = Strategy::same_project_temporal;
  variants[4].shots.resample_per_query = true;
  variants[5].generation.temperature = 0.2;
  variants[6].generation.top_p = 0.95;
  variants[7].generation.max_tokens = 51;
  variants[8].generation.stop = {"\n"};
  variants[9].prompt.open_marker = "<sm>";
  variants[10].prompt.close_marker = "</sm>";
  variants[11].prompt.token_budget = 3999;
  variants[12].prompt.budget_policy = BudgetPolicy::drop_oldest_first;
  variants[13].backend.model = "other-model";

  for (std::size_t i = 0; i < variants.size(); ++i) {
    CAPTURE(i);
    CHECK(config_hash(variants[i]) != h0);
  }

  RunConfig mode_variant = base;
  mode_variant.backend.mode = BackendMode::record;
  CHECK(config_hash(mode_variant) != h0);
}
