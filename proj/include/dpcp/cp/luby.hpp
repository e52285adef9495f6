#pragma once

#include <cassert>
#include <cstdint>

namespace dpcp::cp {

// Luby restart sequence, 1-based: 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4,
// 8, ... Entry i equals 2^(k-1) when i = 2^k - 1, otherwise it repeats the
// prefix.
inline std::int64_t luby(std::int64_t i) {
  assert(i >= 1);
  for (std::int64_t k = 1;; ++k) {
    std::int64_t block = (std::int64_t{1} << k) - 1;
    if (i == block) return std::int64_t{1} << (k - 1);
    if (i < block) {
      i -= (std::int64_t{1} << (k - 1)) - 1;
      k = 0;
    }
  }
}

}  // namespace dpcp::cp
