#pragma once

#include <cstdint>

namespace desired::sim {

// Virtual time is integer microseconds everywhere.
using Time = std::int64_t;

inline constexpr Time kMicrosecond = 1;
inline constexpr Time kMillisecond = 1000;
inline constexpr Time kSecond = 1000 * kMillisecond;

constexpr Time microseconds(std::int64_t v) { return v; }
constexpr Time milliseconds(std::int64_t v) { return v * kMillisecond; }
constexpr Time seconds(std::int64_t v) { return v * kSecond; }

constexpr double to_seconds(Time t) { return static_cast<double>(t) / kSecond; }
constexpr double to_milliseconds(Time t) { return static_cast<double>(t) / kMillisecond; }

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

}  // namespace desired::sim
