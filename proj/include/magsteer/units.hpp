#pragma once

#include <numbers>

namespace magsteer::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 exact values.
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K

/// Gyromagnetic ratio of the Kittel mode, rad s^-1 T^-1.
inline constexpr double kGyromagnetic = kTwoPi * 28.0e9;

constexpr double ghz_to_angular(double ghz) { return kTwoPi * ghz * 1.0e9; }
constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1.0e6; }
constexpr double angular_to_ghz(double omega) { return omega / kTwoPi / 1.0e9; }
constexpr double angular_to_mhz(double omega) { return omega / kTwoPi / 1.0e6; }
constexpr double mk_to_kelvin(double mk) { return mk * 1.0e-3; }
constexpr double kelvin_to_mk(double k) { return k * 1.0e3; }

}  // namespace magsteer::units
