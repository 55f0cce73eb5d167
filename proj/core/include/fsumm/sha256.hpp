#pragma once

#include <string>
#include <string_view>

namespace fsumm {

// Lowercase hex SHA-256 of exactly the given bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace fsumm
