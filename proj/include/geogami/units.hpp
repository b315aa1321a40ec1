#pragma once

#include <numbers>

namespace geogami {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline constexpr double kMmPerM = 1000.0;

}  // namespace geogami
