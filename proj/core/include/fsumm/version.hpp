#pragma once

namespace fsumm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fsumm
