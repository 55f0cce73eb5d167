#include "fsumm/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fsumm/errors.hpp"
#include "fsumm/sha256.hpp"

namespace fsumm {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error(Errc::config, "unknown config key '" + key + "' in " + where);
    }
  }
}

const json* maybe(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <typename T>
void read_into(const json& obj, const char* key, const std::string& where,
               T& out) {
  if (const json* v = maybe(obj, key)) {
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      throw Error(Errc::config,
                  "config key '" + std::string(key) + "' in " + where +
                      " has the wrong type");
    }
  }
}

std::string resolve_path(const std::filesystem::path& base,
                         const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return p;
  return (base / fp).lexically_normal().string();
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::config, "cannot open config file: " + path);
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw Error(Errc::config,
                std::string("config file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error(Errc::config, "config root must be a JSON object");
  }

  RunConfig cfg;
  reject_unknown_keys(root, "config root",
                      {"corpus", "language", "shots", "generation", "prompt",
                       "backend", "out_dir"});

  if (const json* corpus = maybe(root, "corpus")) {
    reject_unknown_keys(*corpus, "corpus",
                        {"train", "test", "pool", "timestamps"});
    read_into(*corpus, "train", "corpus", cfg.corpus.train);
    read_into(*corpus, "test", "corpus", cfg.corpus.test);
    read_into(*corpus, "pool", "corpus", cfg.corpus.pool);
    read_into(*corpus, "timestamps", "corpus", cfg.corpus.timestamps);
  }

  std::string language = "java";
  read_into(root, "language", "config root", language);
  cfg.language = parse_language(language);

  if (const json* shots = maybe(root, "shots")) {
    reject_unknown_keys(*shots, "shots",
                        {"n", "strategy", "seed", "resample_per_query"});
    read_into(*shots, "n", "shots", cfg.shots.n_shots);
    std::string strategy(to_string(cfg.shots.strategy));
    read_into(*shots, "strategy", "shots", strategy);
    cfg.shots.strategy = parse_strategy(strategy);
    read_into(*shots, "seed", "shots", cfg.shots.seed);
    read_into(*shots, "resample_per_query", "shots",
              cfg.shots.resample_per_query);
  }

  if (const json* gen = maybe(root, "generation")) {
    reject_unknown_keys(*gen, "generation",
                        {"temperature", "top_p", "max_tokens", "stop"});
    read_into(*gen, "temperature", "generation", cfg.generation.temperature);
    read_into(*gen, "top_p", "generation", cfg.generation.top_p);
    read_into(*gen, "max_tokens", "generation", cfg.generation.max_tokens);
    read_into(*gen, "stop", "generation", cfg.generation.stop);
    cfg.generation.validate();
  }

  if (const json* prompt = maybe(root, "prompt")) {
    reject_unknown_keys(
        *prompt, "prompt",
        {"open_marker", "close_marker", "token_budget", "budget_policy"});
    read_into(*prompt, "open_marker", "prompt", cfg.prompt.open_marker);
    read_into(*prompt, "close_marker", "prompt", cfg.prompt.close_marker);
    read_into(*prompt, "token_budget", "prompt", cfg.prompt.token_budget);
    std::string policy(to_string(cfg.prompt.budget_policy));
    read_into(*prompt, "budget_policy", "prompt", policy);
    cfg.prompt.budget_policy = parse_budget_policy(policy);
  }

  if (const json* backend = maybe(root, "backend")) {
    if (maybe(*backend, "api_key")) {
      throw Error(Errc::config,
                  "api_key must not appear in config files; "
                  "set FSUMM_API_KEY in the environment");
    }
    reject_unknown_keys(*backend, "backend",
                        {"mode", "endpoint", "model", "fixture", "rate_limit",
                         "max_attempts", "initial_backoff_ms"});
    std::string mode = to_string(cfg.backend.mode);
    read_into(*backend, "mode", "backend", mode);
    cfg.backend.mode = parse_backend_mode(mode);
    read_into(*backend, "endpoint", "backend", cfg.backend.endpoint);
    read_into(*backend, "model", "backend", cfg.backend.model);
    read_into(*backend, "fixture", "backend", cfg.backend.fixture_path);
    if (const json* rl = maybe(*backend, "rate_limit")) {
      reject_unknown_keys(*rl, "rate_limit",
                          {"max_requests", "window_seconds"});
      read_into(*rl, "max_requests", "rate_limit",
                cfg.backend.rate_limit.max_requests);
      long window_seconds = 60;
      read_into(*rl, "window_seconds", "rate_limit", window_seconds);
      if (window_seconds < 1) {
        throw Error(Errc::config, "rate_limit window must be at least 1 s");
      }
      cfg.backend.rate_limit.window = std::chrono::seconds(window_seconds);
    }
    read_into(*backend, "max_attempts", "backend", cfg.backend.max_attempts);
    long backoff_ms = static_cast<long>(cfg.backend.initial_backoff.count());
    read_into(*backend, "initial_backoff_ms", "backend", backoff_ms);
    if (backoff_ms < 0) {
      throw Error(Errc::config, "initial_backoff_ms must be non-negative");
    }
    cfg.backend.initial_backoff = std::chrono::milliseconds(backoff_ms);
  }

  read_into(root, "out_dir", "config root", cfg.out_dir);

  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  cfg.corpus.train = resolve_path(base, cfg.corpus.train);
  cfg.corpus.test = resolve_path(base, cfg.corpus.test);
  cfg.corpus.pool = resolve_path(base, cfg.corpus.pool);
  cfg.corpus.timestamps = resolve_path(base, cfg.corpus.timestamps);
  cfg.backend.fixture_path = resolve_path(base, cfg.backend.fixture_path);
  cfg.out_dir = resolve_path(base, cfg.out_dir);
  return cfg;
}

std::string semantic_config_json(const RunConfig& cfg) {
  json j;
  j["generation"]["max_tokens"] = cfg.generation.max_tokens;
  j["generation"]["stop"] = cfg.generation.stop;
  j["generation"]["temperature"] = cfg.generation.temperature;
  j["generation"]["top_p"] = cfg.generation.top_p;
  j["language"] = std::string(to_string(cfg.language));
  j["model"] = cfg.backend.model;
  j["mode"] = to_string(cfg.backend.mode);
  j["prompt"]["budget_policy"] = std::string(to_string(cfg.prompt.budget_policy));
  j["prompt"]["close_marker"] = cfg.prompt.close_marker;
  j["prompt"]["open_marker"] = cfg.prompt.open_marker;
  j["prompt"]["token_budget"] = cfg.prompt.token_budget;
  j["shots"]["n"] = cfg.shots.n_shots;
  j["shots"]["resample_per_query"] = cfg.shots.resample_per_query;
  j["shots"]["seed"] = cfg.shots.seed;
  j["shots"]["strategy"] = std::string(to_string(cfg.shots.strategy));
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  return sha256_hex(semantic_config_json(cfg));
}

}  // namespace fsumm
