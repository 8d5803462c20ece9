#pragma once

#include <cmath>
#include <stdexcept>

// Frequency scale conversions (bark, mel, ERB) and the absolute threshold
// of hearing. All functions are pure and stateless.

namespace aurafeat {

/// Bark value of a frequency in Hz. b(0) = 0, strictly increasing.
inline double hz_to_bark(double f) {
  return 13.0 * std::atan(0.00076 * f) + 3.5 * std::atan(f / 7500.0);
}

/// Absolute threshold of hearing in dB SPL. Diverges at f = 0.
inline double ath_db(double f) {
  if (f <= 0.0) throw std::domain_error("ath_db requires f > 0");
  const double khz = 1e-3 * f;
  return 3.64 * std::pow(khz, -0.8) -
         6.5 * std::exp(-0.6 * (khz - 3.3) * (khz - 3.3)) +
         1e-15 * f * f * f * f;
}

/// HTK mel scale.
inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }

inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

/// Glasberg-Moore equivalent rectangular bandwidth in Hz.
inline double erb_bandwidth(double f) { return 24.7 * (4.37 * f / 1000.0 + 1.0); }

/// ERB-rate (number of ERBs below f); used to space gammatone centers.
inline double hz_to_erb_rate(double f) { return 21.4 * std::log10(0.00437 * f + 1.0); }

inline double erb_rate_to_hz(double r) {
  return (std::pow(10.0, r / 21.4) - 1.0) / 0.00437;
}

}  // namespace aurafeat
