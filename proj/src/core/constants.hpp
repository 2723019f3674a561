#pragma once

namespace rss_sentry {

inline constexpr double kSpeedOfLightMps = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Carrier frequency (Hz) -> free-space wavelength (m).
double wavelength_m(double carrier_hz);

}  // namespace rss_sentry
