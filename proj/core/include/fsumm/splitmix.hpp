#pragma once

#include <cstdint>
#include <string_view>

namespace fsumm {

// Deterministic 64-bit generator used for every seeded draw in the harness.
// The exact algorithm is part of the reproducibility contract and is written
// out in docs/determinism.md so it can be re-implemented independently.
class Splitmix64 {
public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Value in [0, bound) by modulo reduction; bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

private:
  std::uint64_t state_;
};

// FNV-1a, used to fold string ids into per-query seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace fsumm
