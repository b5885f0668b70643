#pragma once

#include <cstdint>

namespace rsim {

// Virtual time. One tick is one microsecond; all event timestamps and
// durations are integer tick counts so that runs are exactly reproducible.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosecond = 1;
inline constexpr SimTime kMillisecond = 1000 * kMicrosecond;
inline constexpr SimTime kSecond = 1000 * kMillisecond;

constexpr double to_ms(SimTime t) { return static_cast<double>(t) / static_cast<double>(kMillisecond); }
constexpr SimTime from_ms(double ms) { return static_cast<SimTime>(ms * static_cast<double>(kMillisecond)); }

using ServerId = std::int32_t;
using ClientId = std::int32_t;
using KeyId = std::uint64_t;

}  // namespace rsim
