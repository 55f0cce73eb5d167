#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fsumm {

struct GenerationParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 50;
  // Empty by default: summaries are clipped client-side at the close
  // marker, so a server-side stop sequence is a pure optimization.
  std::vector<std::string> stop;

  // Throws Error(Errc::config) on out-of-range values.
  void validate() const;

  bool operator==(const GenerationParams&) const = default;
};

// Stable JSON rendering of params (sorted keys) used as part of the
// fixture lookup key, so a recorded completion is only replayed for the
// exact generation settings it was produced under.
std::string canonical_params_json(const GenerationParams& params);

struct CompletionRecord {
  std::string prompt_sha256;
  GenerationParams params;
  std::string completion;
  std::string backend;  // model or tool that produced the completion
  std::optional<long> latency_ms;
};

struct RateLimit {
  std::size_t max_requests = 20;  // 0 disables limiting
  std::chrono::milliseconds window{60'000};
};

// Blocks callers so that at most `max_requests` acquisitions happen in any
// sliding `window`. Thread-safe.
class RateLimiter {
 public:
  explicit RateLimiter(RateLimit limit);
  void acquire();

 private:
  RateLimit limit_;
  std::mutex mu_;
  std::deque<std::chrono::steady_clock::time_point> sent_;
};

enum class BackendMode { live, record, replay };

BackendMode parse_backend_mode(const std::string& s);
std::string to_string(BackendMode mode);

struct BackendConfig {
  BackendMode mode = BackendMode::replay;
  std::string endpoint;  // full URL, e.g. https://api.example.com/v1/completions
  std::string api_key;   // sent as a bearer token when non-empty
  std::string model = "code-davinci-002";
  std::string fixture_path;  // JSONL store, required for record/replay
  RateLimit rate_limit;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

// In-memory index over a JSONL completion store. Lines are objects with
// prompt_sha256, params, completion, and backend fields; on duplicate keys
// the last line wins.
class FixtureStore {
 public:
  // Throws Error(Errc::io) when the file cannot be opened.
  static FixtureStore load(const std::string& path);
  // Missing file yields an empty store (record mode starts fresh).
  static FixtureStore load_or_empty(const std::string& path);

  const CompletionRecord* lookup(const std::string& prompt_sha256,
                                 const GenerationParams& params) const;
  // Appends one record to `path` and indexes it.
  void append(const std::string& path, const CompletionRecord& rec);
  std::size_t size() const { return records_.size(); }

 private:
  std::unordered_map<std::string, CompletionRecord> records_;
};

struct BatchItem {
  std::string id;
  std::string prompt;
};

struct BatchError {
  std::string message;
  int exit_code = 4;
};

struct BatchResult {
  std::map<std::string, std::string> completions;  // id -> completion text
  std::map<std::string, BatchError> errors;        // id -> failure detail
};

class Backend {
 public:
  explicit Backend(BackendConfig cfg);
  ~Backend();

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  // One completion for one prompt, honoring the configured mode:
  //   replay  - fixture only; miss throws FixtureMissError, no network
  //   record  - fixture hit short-circuits, miss fetches and appends
  //   live    - always fetches, never touches the fixture store
  // Network fetches are rate-limited and retried (transport, 5xx, 429)
  // with exponential backoff; 401/403 throw Error(Errc::auth) immediately.
  std::string complete(const std::string& prompt,
                       const GenerationParams& params);

  // Runs items under `concurrency` worker threads. With fail_fast the
  // first failure (by item order) is rethrown after workers drain;
  // otherwise failures land in BatchResult::errors keyed by item id.
  BatchResult run_batch(const std::vector<BatchItem>& items,
                        const GenerationParams& params,
                        std::size_t concurrency, bool fail_fast);

  const BackendConfig& config() const { return cfg_; }

 private:
  std::string fetch(const std::string& prompt, const GenerationParams& params);

  BackendConfig cfg_;
  RateLimiter limiter_;
  FixtureStore store_;
  std::mutex store_mu_;
};

}  // namespace fsumm
