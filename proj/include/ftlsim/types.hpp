#pragma once

#include <cstdint>
#include <limits>

namespace ftlsim {

using Lpa = std::uint64_t;      // logical page address
using Ppa = std::uint64_t;      // physical page address
using BlockId = std::uint32_t;  // global block index (channel-major)
using Time = std::uint64_t;     // logical clock, counts host page writes

inline constexpr Ppa kNoPpa = std::numeric_limits<Ppa>::max();
inline constexpr Lpa kNoLpa = std::numeric_limits<Lpa>::max();
inline constexpr Time kNoTime = std::numeric_limits<Time>::max();
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

inline Time sat_add(Time a, Time b) {
  return a > kNoTime - b ? kNoTime : a + b;
}

}  // namespace ftlsim
