#pragma once

#include <numbers>

namespace wgm {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNanometre = 1e-9;
inline constexpr double kMicrometre = 1e-6;
inline constexpr double kCubicMicrometre = 1e-18;

// Rates are carried internally as angular frequencies (rad/s); all file and
// CLI I/O uses MHz of ordinary frequency.
inline constexpr double kRadPerSecPerMHz = kTwoPi * 1e6;

constexpr double mhz_to_rad_per_s(double mhz) { return mhz * kRadPerSecPerMHz; }
constexpr double rad_per_s_to_mhz(double omega) { return omega / kRadPerSecPerMHz; }

}  // namespace wgm
