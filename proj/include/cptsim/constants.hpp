#pragma once

namespace cpt {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Rb-87 D1 line data (Steck tables).
inline constexpr double kNaturalLinewidth = kTwoPi * 5.75e6;            // rad/s
inline constexpr double kGroundHyperfineSplitting = kTwoPi * 6.834682610904e9;  // rad/s
inline constexpr double kExcitedHyperfineSplitting = kTwoPi * 817e6;    // rad/s, effective default

// N2 buffer-gas pressure broadening of the optical line (FWHM growth).
inline constexpr double kN2BroadeningPerTorr = kTwoPi * 17.8e6;  // rad/s per Torr
inline constexpr double kBufferPressureTorr = 10.0;

// Vapor density at the operating temperature.
inline constexpr double kDensityPerCm3 = 7e10;
inline constexpr double kDensityPerM3 = kDensityPerCm3 * 1e6;

inline constexpr double total_excited_linewidth(double pressureTorr) {
  return kNaturalLinewidth + kN2BroadeningPerTorr * pressureTorr;
}

}  // namespace cpt
