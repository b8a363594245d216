#pragma once

#include <cstdint>
#include <string_view>

namespace lobrate {

enum class Side : std::uint8_t { Buy = 0, Sell = 1 };

inline std::string_view to_string(Side s) noexcept { return s == Side::Buy ? "buy" : "sell"; }

/// Prices are carried in integer units of 0.01 (12.14 -> 1214).
using Price = std::uint32_t;
using OrderId = std::uint64_t;
using Timestamp = std::uint64_t;  // nanoseconds since session start

inline constexpr int kArrivalTicks = 15;
inline constexpr int kCancelTicks = 10;

}  // namespace lobrate
