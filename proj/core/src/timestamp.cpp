#include "fsumm/timestamp.hpp"

#include <cstdio>

#include "fsumm/errors.hpp"

namespace fsumm {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(std::int64_t y, std::int64_t m, std::int64_t d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, std::int64_t& m,
                     std::int64_t& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = yoe + era * 400;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

[[noreturn]] void fail(std::string_view text) {
  throw Error(Errc::bad_timestamp,
              "not an ISO-8601 UTC timestamp: '" + std::string(text) + "'");
}

}  // namespace

std::int64_t parse_iso8601_utc(std::string_view text) {
  // Fixed layout: 0123456789012345678 -> YYYY-MM-DDThh:mm:ssZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' ||
      text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      text[19] != 'Z') {
    fail(text);
  }
  const auto year = text.substr(0, 4);
  const auto month = text.substr(5, 2);
  const auto day = text.substr(8, 2);
  const auto hour = text.substr(11, 2);
  const auto minute = text.substr(14, 2);
  const auto second = text.substr(17, 2);
  if (!all_digits(year) || !all_digits(month) || !all_digits(day) ||
      !all_digits(hour) || !all_digits(minute) || !all_digits(second)) {
    fail(text);
  }
  const int y = to_int(year), mo = to_int(month), d = to_int(day);
  const int h = to_int(hour), mi = to_int(minute), s = to_int(second);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    fail(text);
  }
  // Round-trip through the civil conversion to reject day-of-month overflow
  // such as 2021-02-30.
  const std::int64_t days = days_from_civil(y, mo, d);
  std::int64_t ry, rm, rd;
  civil_from_days(days, ry, rm, rd);
  if (ry != y || rm != mo || rd != d) fail(text);
  return days * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t unix_seconds) {
  std::int64_t days = unix_seconds / 86400;
  std::int64_t rem = unix_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y, m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04lld-%02lld-%02lldT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), static_cast<long long>(m),
                static_cast<long long>(d), static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace fsumm
