#pragma once

#include <numbers>

namespace anisoqubit {

// Internal units: time in ns, angular frequency in rad/ns, rates in 1/ns.
// User-facing frequencies are ordinary frequencies in MHz.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// MHz (ordinary frequency) -> rad/ns.
constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
/// rad/ns -> MHz.
constexpr double angular_to_mhz(double omega) { return omega / kTwoPi * 1e3; }
/// MHz event rate -> events per ns.
constexpr double mhz_to_rate(double f_mhz) { return f_mhz * 1e-3; }
constexpr double rate_to_mhz(double rate) { return rate * 1e3; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace anisoqubit
