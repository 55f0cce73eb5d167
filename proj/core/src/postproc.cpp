#include "fsumm/postproc.hpp"

#include <cstdint>
#include <utility>

#include "fsumm/errors.hpp"

namespace fsumm {
namespace {

bool is_whitespace_codepoint(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes the UTF-8 sequence at `i` and advances `i` past it. Malformed
// bytes count as opaque non-whitespace, consumed one byte at a time.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  std::size_t need = 0;
  std::uint32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + need >= s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (std::size_t k = 1; k <= need; ++k) {
    const unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += need + 1;
  return cp;
}

}  // namespace

std::string clip_summary(std::string_view raw, std::string_view close_marker) {
  if (close_marker.empty()) {
    throw Error(Errc::config, "close marker must be non-empty");
  }
  const std::size_t at = raw.find(close_marker);
  const std::string_view head =
      (at == std::string_view::npos) ? raw : raw.substr(0, at);

  std::size_t begin = 0;
  std::size_t end = 0;
  bool seen_nonspace = false;
  std::size_t i = 0;
  while (i < head.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = decode_utf8(head, i);
    if (!is_whitespace_codepoint(cp)) {
      if (!seen_nonspace) {
        begin = start;
        seen_nonspace = true;
      }
      end = i;
    }
  }
  if (!seen_nonspace) return {};
  return std::string(head.substr(begin, end - begin));
}

std::vector<std::string> tokenize_for_eval(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = decode_utf8(text, i);
    if (is_whitespace_codepoint(cp)) {
      if (!cur.empty()) out.push_back(std::exchange(cur, {}));
    } else {
      cur.append(text.substr(start, i - start));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::uint32_t cp = decode_utf8(text, i);
    if (is_whitespace_codepoint(cp)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

CandidateSummary make_candidate(std::string query_id, std::string raw,
                                std::string_view close_marker) {
  CandidateSummary c;
  c.query_id = std::move(query_id);
  c.clipped = clip_summary(raw, close_marker);
  c.raw = std::move(raw);
  c.tokens = tokenize_for_eval(c.clipped);
  return c;
}

}  // namespace fsumm
