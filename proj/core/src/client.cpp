#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "fsumm/client.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fsumm/errors.hpp"
#include "fsumm/sha256.hpp"

namespace fsumm {

using nlohmann::json;

void GenerationParams::validate() const {
  if (temperature < 0.0 || temperature > 2.0) {
    throw Error(Errc::config, "temperature out of range [0, 2]");
  }
  if (top_p <= 0.0 || top_p > 1.0) {
    throw Error(Errc::config, "top_p out of range (0, 1]");
  }
  if (max_tokens < 1) {
    throw Error(Errc::config, "max_tokens must be at least 1");
  }
}

std::string canonical_params_json(const GenerationParams& params) {
  json j;  // object keys serialize sorted
  j["max_tokens"] = params.max_tokens;
  j["stop"] = params.stop;
  j["temperature"] = params.temperature;
  j["top_p"] = params.top_p;
  return j.dump();
}

RateLimiter::RateLimiter(RateLimit limit) : limit_(limit) {}

void RateLimiter::acquire() {
  if (limit_.max_requests == 0) return;
  for (;;) {
    std::chrono::steady_clock::duration wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      while (!sent_.empty() && now - sent_.front() >= limit_.window) {
        sent_.pop_front();
      }
      if (sent_.size() < limit_.max_requests) {
        sent_.push_back(now);
        return;
      }
      wait = sent_.front() + limit_.window - now;
    }
    std::this_thread::sleep_for(wait);
  }
}

BackendMode parse_backend_mode(const std::string& s) {
  if (s == "live") return BackendMode::live;
  if (s == "record") return BackendMode::record;
  if (s == "replay") return BackendMode::replay;
  throw Error(Errc::config, "unknown backend mode: " + s);
}

std::string to_string(BackendMode mode) {
  switch (mode) {
    case BackendMode::live: return "live";
    case BackendMode::record: return "record";
    case BackendMode::replay: return "replay";
  }
  throw Error(Errc::config, "invalid backend mode value");
}

namespace {

std::string fixture_key(const std::string& prompt_sha256,
                        const GenerationParams& params) {
  return prompt_sha256 + '\x1F' + canonical_params_json(params);
}

GenerationParams params_from_json(const json& j) {
  GenerationParams p;
  p.temperature = j.at("temperature").get<double>();
  p.top_p = j.at("top_p").get<double>();
  p.max_tokens = j.at("max_tokens").get<int>();
  p.stop = j.at("stop").get<std::vector<std::string>>();
  return p;
}

json params_to_json(const GenerationParams& p) {
  json j;
  j["max_tokens"] = p.max_tokens;
  j["stop"] = p.stop;
  j["temperature"] = p.temperature;
  j["top_p"] = p.top_p;
  return j;
}

FixtureStore parse_fixture_stream(std::istream& in) {
  FixtureStore store;
  std::string line;
  std::size_t line_no = 0;
  std::string dummy_path;  // index-only: append() target unused here
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      CompletionRecord rec;
      rec.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
      rec.params = params_from_json(j.at("params"));
      rec.completion = j.at("completion").get<std::string>();
      rec.backend = j.value("backend", std::string{});
      if (j.contains("latency_ms")) {
        rec.latency_ms = j.at("latency_ms").get<long>();
      }
      store.append(dummy_path, rec);
    } catch (const json::exception& e) {
      throw MalformedLineError(line_no,
                               std::string("bad fixture record: ") + e.what());
    }
  }
  return store;
}

}  // namespace

FixtureStore FixtureStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io, "cannot open fixture store: " + path);
  }
  return parse_fixture_stream(in);
}

FixtureStore FixtureStore::load_or_empty(const std::string& path) {
  std::ifstream in(path);
  if (!in) return FixtureStore{};
  return parse_fixture_stream(in);
}

const CompletionRecord* FixtureStore::lookup(
    const std::string& prompt_sha256, const GenerationParams& params) const {
  const auto it = records_.find(fixture_key(prompt_sha256, params));
  return it == records_.end() ? nullptr : &it->second;
}

void FixtureStore::append(const std::string& path,
                          const CompletionRecord& rec) {
  if (!path.empty()) {
    std::ofstream out(path, std::ios::app);
    if (!out) {
      throw Error(Errc::io, "cannot append to fixture store: " + path);
    }
    json j;
    j["prompt_sha256"] = rec.prompt_sha256;
    j["params"] = params_to_json(rec.params);
    j["completion"] = rec.completion;
    j["backend"] = rec.backend;
    if (rec.latency_ms) j["latency_ms"] = *rec.latency_ms;
    out << j.dump() << '\n';
    if (!out) {
      throw Error(Errc::io, "write failed on fixture store: " + path);
    }
  }
  records_[fixture_key(rec.prompt_sha256, rec.params)] = rec;
}

namespace {

// Splits a URL into the scheme://host[:port] base httplib wants and the
// request path.
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::config, "endpoint must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status <= 599);
}

}  // namespace

Backend::Backend(BackendConfig cfg)
    : cfg_(std::move(cfg)), limiter_(cfg_.rate_limit) {
  if (cfg_.mode != BackendMode::live && cfg_.fixture_path.empty()) {
    throw Error(Errc::config, "record/replay modes need a fixture path");
  }
  if (cfg_.mode != BackendMode::replay && cfg_.endpoint.empty()) {
    throw Error(Errc::config, "live/record modes need an endpoint");
  }
  if (cfg_.max_attempts < 1) {
    throw Error(Errc::config, "max_attempts must be at least 1");
  }
  if (cfg_.mode == BackendMode::replay) {
    store_ = FixtureStore::load(cfg_.fixture_path);
  } else if (cfg_.mode == BackendMode::record) {
    store_ = FixtureStore::load_or_empty(cfg_.fixture_path);
  }
}

Backend::~Backend() = default;

std::string Backend::fetch(const std::string& prompt,
                           const GenerationParams& params) {
  const auto [base, path] = split_endpoint(cfg_.endpoint);

  json body;
  body["model"] = cfg_.model;
  body["prompt"] = prompt;
  body["temperature"] = params.temperature;
  body["top_p"] = params.top_p;
  body["max_tokens"] = params.max_tokens;
  body["stop"] = params.stop;
  const std::string payload = body.dump();

  std::string last_failure = "no attempts made";
  auto backoff = cfg_.initial_backoff;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    limiter_.acquire();

    httplib::Client cli(base);
    cli.set_connection_timeout(10, 0);
    cli.set_read_timeout(120, 0);
    cli.set_write_timeout(30, 0);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    }
    auto res = cli.Post(path, headers, payload, "application/json");

    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(Errc::auth,
                  "backend rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (retryable_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(Errc::transport,
                  "backend error HTTP " + std::to_string(res->status));
    }
    try {
      const json j = json::parse(res->body);
      return j.at("choices").at(0).at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(Errc::transport,
                  std::string("malformed backend response: ") + e.what());
    }
  }
  throw Error(Errc::transport, "gave up after " +
                                   std::to_string(cfg_.max_attempts) +
                                   " attempts; last: " + last_failure);
}

std::string Backend::complete(const std::string& prompt,
                              const GenerationParams& params) {
  params.validate();
  const std::string hash = sha256_hex(prompt);

  if (cfg_.mode != BackendMode::live) {
    std::lock_guard lock(store_mu_);
    if (const CompletionRecord* rec = store_.lookup(hash, params)) {
      return rec->completion;
    }
    if (cfg_.mode == BackendMode::replay) {
      throw FixtureMissError(hash);
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::string completion = fetch(prompt, params);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);

  if (cfg_.mode == BackendMode::record) {
    CompletionRecord rec;
    rec.prompt_sha256 = hash;
    rec.params = params;
    rec.completion = completion;
    rec.backend = cfg_.model;
    rec.latency_ms = static_cast<long>(elapsed.count());
    std::lock_guard lock(store_mu_);
    // Another worker may have recorded the same prompt meanwhile; keep one.
    if (!store_.lookup(hash, params)) {
      store_.append(cfg_.fixture_path, rec);
    }
  }
  return completion;
}

BatchResult Backend::run_batch(const std::vector<BatchItem>& items,
                               const GenerationParams& params,
                               std::size_t concurrency, bool fail_fast) {
  if (concurrency == 0) {
    throw Error(Errc::config, "concurrency must be at least 1");
  }
  params.validate();

  std::vector<std::string> completions(items.size());
  std::vector<std::exception_ptr> failures(items.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size() || stop.load()) return;
      try {
        completions[i] = complete(items[i].prompt, params);
      } catch (...) {
        failures[i] = std::current_exception();
        if (fail_fast) stop.store(true);
      }
    }
  };

  const std::size_t n_workers = std::min(concurrency, items.size());
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  BatchResult result;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (failures[i]) {
      if (fail_fast) std::rethrow_exception(failures[i]);
      try {
        std::rethrow_exception(failures[i]);
      } catch (const Error& e) {
        result.errors[items[i].id] = BatchError{e.what(), e.exit_code()};
      } catch (const std::exception& e) {
        result.errors[items[i].id] = BatchError{e.what(), 4};
      }
    } else if (!stop.load() || !fail_fast) {
      result.completions[items[i].id] = completions[i];
    }
  }
  return result;
}

}  // namespace fsumm
