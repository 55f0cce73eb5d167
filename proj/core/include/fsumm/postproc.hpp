#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fsumm {

// A raw model continuation turned into a scoreable summary.
struct CandidateSummary {
  std::string query_id;
  std::string raw;
  std::string clipped;
  std::vector<std::string> tokens;  // whitespace-split of clipped; may be empty
};

// Substring of raw strictly before the first occurrence of close_marker
// (whole string if absent), with leading/trailing whitespace removed.
std::string clip_summary(std::string_view raw, std::string_view close_marker);

// Split on runs of Unicode whitespace. No case folding, no punctuation
// splitting.
std::vector<std::string> tokenize_for_eval(std::string_view text);

// Token count of tokenize_for_eval without materializing the tokens.
std::size_t whitespace_token_count(std::string_view text);

CandidateSummary make_candidate(std::string query_id, std::string raw,
                                std::string_view close_marker);

}  // namespace fsumm
