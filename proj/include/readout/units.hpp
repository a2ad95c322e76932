#pragma once

#include <numbers>

// Internal units: angular frequencies and rates in rad/ns, times in ns, drive
// amplitudes in sqrt(photons/ns). Config files use GHz/MHz/us and are
// converted once at load.
namespace readout::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double ghz_to_rad_per_ns(double f_ghz) { return kTwoPi * f_ghz; }
constexpr double mhz_to_rad_per_ns(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
constexpr double rad_per_ns_to_ghz(double w) { return w / kTwoPi; }
constexpr double rad_per_ns_to_mhz(double w) { return w / kTwoPi * 1e3; }

constexpr double per_us_to_per_ns(double r) { return r * 1e-3; }
constexpr double per_ns_to_per_us(double r) { return r * 1e3; }

}  // namespace readout::units
