#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsumm {

enum class Language { java, python, ruby, javascript, go, php };
enum class Split { train, test };

Language parse_language(std::string_view name);
Split parse_split(std::string_view name);
std::string_view to_string(Language lang);
std::string_view to_string(Split split);

// One (function, summary) pair. code_tokens / summary_tokens are the
// benchmark's own token lists; created_at is unix seconds UTC.
struct CodeSample {
  std::string id;
  Language language = Language::java;
  std::string project;
  std::string path;
  std::string code_text;
  std::vector<std::string> code_tokens;
  std::string summary_text;
  std::vector<std::string> summary_tokens;
  std::optional<std::int64_t> created_at;

  bool operator==(const CodeSample&) const = default;
};

struct Corpus {
  Split split = Split::test;
  Language language = Language::java;
  std::vector<CodeSample> samples;

  std::size_t size() const { return samples.size(); }
  const CodeSample* find(std::string_view id) const;

  bool operator==(const Corpus&) const = default;
};

struct LoadOptions {
  // Recover a missing docstring_tokens field by whitespace-splitting
  // docstring. Off by default; strict mode rejects such lines.
  bool lenient = false;
};

// JSON-lines ingestion. Required fields per line: code, docstring,
// code_tokens, docstring_tokens, repo, path. Optional: id (defaults to
// "<split>-<line_number>", 1-based), created_at (unix seconds or ISO-8601 Z).
Corpus load_jsonl(const std::filesystem::path& file, Split split,
                  Language language, const LoadOptions& options = {});
Corpus parse_jsonl(std::string_view text, Split split, Language language,
                   const LoadOptions& options = {});

// Canonical serialization; load(serialize(c)) == c.
std::string serialize_jsonl(const Corpus& corpus);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& file);

// SHA-256 of the canonical serialization. Two runs are comparable iff their
// test corpora hash identically.
std::string corpus_content_hash(const Corpus& corpus);

// Uniform subset without replacement, deterministic in (corpus, n, seed);
// keeps the original relative order. See docs/determinism.md for the exact
// draw algorithm.
Corpus sample_test_subset(const Corpus& corpus, std::size_t n,
                          std::uint64_t seed);

using TimestampTable = std::map<std::string, std::int64_t>;

// Two-column UTF-8 text: id<TAB>ISO-8601Z, one row per sample.
TimestampTable load_timestamp_table(const std::filesystem::path& file);

Corpus attach_timestamps(const Corpus& corpus, const TimestampTable& table);

Corpus filter_project(const Corpus& corpus, std::string_view project);

}  // namespace fsumm
