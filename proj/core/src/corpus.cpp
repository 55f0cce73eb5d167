#include "fsumm/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "fsumm/errors.hpp"
#include "fsumm/sha256.hpp"
#include "fsumm/splitmix.hpp"
#include "fsumm/timestamp.hpp"

namespace fsumm {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::int64_t now_unix_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::vector<std::string> whitespace_split(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      if (!cur.empty()) out.push_back(std::exchange(cur, {}));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw MalformedLineError(line_no,
                             "missing required field '" + std::string(key) + "'");
  }
  if (!it->is_string()) {
    throw MalformedLineError(line_no,
                             "field '" + std::string(key) + "' is not a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> require_string_array(const json& obj, const char* key,
                                              std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw MalformedLineError(line_no,
                             "missing required field '" + std::string(key) + "'");
  }
  if (!it->is_array()) {
    throw MalformedLineError(line_no,
                             "field '" + std::string(key) + "' is not an array");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& el : *it) {
    if (!el.is_string()) {
      throw MalformedLineError(
          line_no, "field '" + std::string(key) + "' has a non-string element");
    }
    out.push_back(el.get<std::string>());
  }
  return out;
}

std::int64_t parse_created_at(const json& value, std::size_t line_no) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_string()) {
    try {
      return parse_iso8601_utc(value.get<std::string>());
    } catch (const Error& e) {
      throw MalformedLineError(line_no, e.what());
    }
  }
  throw MalformedLineError(line_no,
                           "created_at must be unix seconds or ISO-8601 Z");
}

}  // namespace

Language parse_language(std::string_view name) {
  if (name == "java") return Language::java;
  if (name == "python") return Language::python;
  if (name == "ruby") return Language::ruby;
  if (name == "javascript") return Language::javascript;
  if (name == "go") return Language::go;
  if (name == "php") return Language::php;
  throw Error(Errc::config, "unknown language '" + std::string(name) + "'");
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  throw Error(Errc::config, "unknown split '" + std::string(name) + "'");
}

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::java: return "java";
    case Language::python: return "python";
    case Language::ruby: return "ruby";
    case Language::javascript: return "javascript";
    case Language::go: return "go";
    case Language::php: return "php";
  }
  return "?";
}

std::string_view to_string(Split split) {
  return split == Split::train ? "train" : "test";
}

const CodeSample* Corpus::find(std::string_view id) const {
  for (const auto& s : samples) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Corpus parse_jsonl(std::string_view text, Split split, Language language,
                   const LoadOptions& options) {
  Corpus corpus;
  corpus.split = split;
  corpus.language = language;

  const std::int64_t now = now_unix_seconds();
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = (end == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, end - pos);
    pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos > text.size()) break;  // trailing newline
      ++line_no;
      throw MalformedLineError(line_no, "empty line");
    }
    ++line_no;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedLineError(line_no, e.what());
    }
    if (!obj.is_object()) {
      throw MalformedLineError(line_no, "line is not a JSON object");
    }

    CodeSample sample;
    sample.language = language;
    sample.code_text = require_string(obj, "code", line_no);
    sample.summary_text = require_string(obj, "docstring", line_no);
    sample.code_tokens = require_string_array(obj, "code_tokens", line_no);
    if (obj.contains("docstring_tokens")) {
      sample.summary_tokens =
          require_string_array(obj, "docstring_tokens", line_no);
    } else if (options.lenient) {
      sample.summary_tokens = whitespace_split(sample.summary_text);
    } else {
      throw MalformedLineError(line_no,
                               "missing required field 'docstring_tokens'");
    }
    sample.project = require_string(obj, "repo", line_no);
    sample.path = require_string(obj, "path", line_no);

    if (auto it = obj.find("id"); it != obj.end()) {
      if (!it->is_string()) {
        throw MalformedLineError(line_no, "field 'id' is not a string");
      }
      sample.id = it->get<std::string>();
    } else {
      sample.id =
          std::string(to_string(split)) + "-" + std::to_string(line_no);
    }

    if (auto it = obj.find("created_at"); it != obj.end() && !it->is_null()) {
      sample.created_at = parse_created_at(*it, line_no);
      if (*sample.created_at > now) {
        throw MalformedLineError(line_no, "created_at is in the future");
      }
    }

    if (sample.code_tokens.empty()) {
      throw MalformedLineError(line_no, "code_tokens is empty");
    }
    if (sample.summary_tokens.empty()) {
      throw MalformedLineError(line_no, "docstring_tokens is empty");
    }

    corpus.samples.push_back(std::move(sample));
  }

  if (corpus.samples.empty()) {
    throw Error(Errc::empty_corpus, "corpus has zero samples");
  }

  std::set<std::string_view> ids;
  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (const auto& s : corpus.samples) {
    if (!ids.insert(s.id).second) {
      throw Error(Errc::duplicate_id, "duplicate sample id '" + s.id + "'");
    }
    if (!pairs.insert({s.code_text, s.summary_text}).second) {
      throw Error(Errc::duplicate_sample,
                  "duplicate (code, docstring) pair at id '" + s.id + "'");
    }
  }
  return corpus;
}

Corpus load_jsonl(const std::filesystem::path& file, Split split,
                  Language language, const LoadOptions& options) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(Errc::io, "cannot open corpus file: " + file.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_jsonl(buf.str(), split, language, options);
}

std::string serialize_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.samples) {
    ordered_json obj;
    obj["id"] = s.id;
    obj["repo"] = s.project;
    obj["path"] = s.path;
    obj["code"] = s.code_text;
    obj["code_tokens"] = s.code_tokens;
    obj["docstring"] = s.summary_text;
    obj["docstring_tokens"] = s.summary_tokens;
    if (s.created_at) obj["created_at"] = format_iso8601_utc(*s.created_at);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_jsonl(const Corpus& corpus, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::io, "cannot write corpus file: " + file.string());
  }
  out << serialize_jsonl(corpus);
}

std::string corpus_content_hash(const Corpus& corpus) {
  return sha256_hex(serialize_jsonl(corpus));
}

Corpus sample_test_subset(const Corpus& corpus, std::size_t n,
                          std::uint64_t seed) {
  if (n > corpus.size()) {
    throw Error(Errc::subset_too_large,
                "requested subset of " + std::to_string(n) + " from corpus of " +
                    std::to_string(corpus.size()));
  }
  // Fisher-Yates prefix over the index array, then ascending sort of the
  // selected indices so the subset keeps the original relative order.
  std::vector<std::size_t> indices(corpus.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Splitmix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<std::size_t> selected(indices.begin(), indices.begin() + n);
  std::sort(selected.begin(), selected.end());

  Corpus out;
  out.split = corpus.split;
  out.language = corpus.language;
  out.samples.reserve(n);
  for (std::size_t idx : selected) out.samples.push_back(corpus.samples[idx]);
  return out;
}

TimestampTable load_timestamp_table(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(Errc::io, "cannot open timestamp table: " + file.string());
  }
  TimestampTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw MalformedLineError(line_no, "expected id<TAB>ISO-8601");
    }
    const std::string id = line.substr(0, tab);
    std::int64_t ts;
    try {
      ts = parse_iso8601_utc(std::string_view(line).substr(tab + 1));
    } catch (const Error& e) {
      throw MalformedLineError(line_no, e.what());
    }
    if (!table.emplace(id, ts).second) {
      throw MalformedLineError(line_no, "duplicate id '" + id + "'");
    }
  }
  return table;
}

Corpus attach_timestamps(const Corpus& corpus, const TimestampTable& table) {
  for (const auto& [id, ts] : table) {
    if (corpus.find(id) == nullptr) {
      throw Error(Errc::unknown_id,
                  "timestamp table id '" + id + "' matches no sample");
    }
  }
  const std::int64_t now = now_unix_seconds();
  Corpus out = corpus;
  for (auto& s : out.samples) {
    auto it = table.find(s.id);
    if (it == table.end()) continue;
    if (it->second > now) {
      throw Error(Errc::bad_timestamp,
                  "created_at for '" + s.id + "' is in the future");
    }
    s.created_at = it->second;
  }
  return out;
}

Corpus filter_project(const Corpus& corpus, std::string_view project) {
  Corpus out;
  out.split = corpus.split;
  out.language = corpus.language;
  for (const auto& s : corpus.samples) {
    if (s.project == project) out.samples.push_back(s);
  }
  return out;
}

}  // namespace fsumm
