#pragma once

#include "aurafeat/filterbank.hpp"
#include "aurafeat/types.hpp"

// Power-normalized coefficient chain: medium-time power, asymmetric noise
// suppression, temporal masking, weight smoothing, mean power
// normalization, rate-level nonlinearity.

namespace aurafeat {

struct PncConfig {
  int m_window = 2;            // medium-time half window M
  double lambda_t = 0.85;      // peak decay
  double mu_t = 0.2;           // masked-frame gain; 2.0 is the literal variant
  double lambda_a = 0.999;     // lowpass factor when rising
  double lambda_b = 0.5;       // lowpass factor when falling
  int smooth_neighbors = 4;    // spectral weight smoothing half window N
  double power_exponent = 1.0 / 15.0;

  void validate() const {
    if (!(lambda_t > 0.0 && lambda_t < 1.0)) throw std::invalid_argument("pnc: 0 < lambda_t < 1");
    if (!(mu_t > 0.0)) throw std::invalid_argument("pnc: mu_t > 0");
    if (!(lambda_b > 0.0 && lambda_b <= lambda_a && lambda_a < 1.0))
      throw std::invalid_argument("pnc: 0 < lambda_b <= lambda_a < 1");
    if (m_window < 0) throw std::invalid_argument("pnc: m_window >= 0");
    if (smooth_neighbors < 0) throw std::invalid_argument("pnc: smooth_neighbors >= 0");
    if (!(power_exponent > 0.0)) throw std::invalid_argument("pnc: power_exponent > 0");
  }
};

enum class PncStage { P, Q, Q_le, Q_0, R, S, T, U };

struct ChannelPowerMatrix {
  Matrix data;  // frames x channels, elementwise >= 0
  PncStage stage = PncStage::P;
};

inline constexpr double kPncRatioFloor = 1e-20;

/// Squared-normalized-gammatone-filtered magnitude-squared spectrum.
/// Expects already pre-emphasized audio.
ChannelPowerMatrix short_time_power(const AudioBuffer& audio, const StftConfig& cfg,
                                    const FilterBank& fb);

/// Centered moving average over 2M+1 frames per channel; boundaries
/// average only in-range frames.
ChannelPowerMatrix medium_time_power(const ChannelPowerMatrix& p, int m_window);

/// Asymmetric lowpass noise-floor estimate, then half-wave rectified excess.
ChannelPowerMatrix asymmetric_noise_suppression(const ChannelPowerMatrix& q,
                                                const PncConfig& cfg);

/// Running-peak temporal masking producing R.
ChannelPowerMatrix temporal_masking(const ChannelPowerMatrix& q0, const PncConfig& cfg);

/// Channel-smoothed R/Q transfer ratio applied to the short-time power P.
ChannelPowerMatrix weight_smoothing(const ChannelPowerMatrix& r, const ChannelPowerMatrix& q,
                                    const ChannelPowerMatrix& p, int neighbors);

/// Divide by a running average of the per-frame channel mean (factor 0.999).
ChannelPowerMatrix mean_power_normalize(const ChannelPowerMatrix& t);

/// Elementwise power nonlinearity (default exponent 1/15).
Spectrogram rate_level(const ChannelPowerMatrix& u, double exponent, const Vector& center_freqs);

}  // namespace aurafeat
