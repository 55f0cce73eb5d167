#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fsumm {

// Parses "YYYY-MM-DDThh:mm:ssZ" (UTC, seconds precision) to unix seconds.
// Throws Error(Errc::bad_timestamp) on anything else.
std::int64_t parse_iso8601_utc(std::string_view text);

std::string format_iso8601_utc(std::int64_t unix_seconds);

}  // namespace fsumm
