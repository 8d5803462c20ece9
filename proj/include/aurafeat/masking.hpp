#pragma once

#include "aurafeat/dsp.hpp"
#include "aurafeat/types.hpp"

// Simultaneous-masking model: per-frame global masking thresholds and the
// zeroing rule that drops bins below threshold.

namespace aurafeat {

enum class SpreadConvention {
  standard,       // dz = maskee - masker; threshold decays away from the masker
  paper_literal,  // verbatim delta-b = b(masker) - b(maskee) sign
};

struct MaskConfig {
  SpreadConvention spread_convention = SpreadConvention::standard;
  double spl_reference = kSplReferenceDb;  // 96 dB
};

struct MaskingThresholds {
  Matrix theta;     // frames x bins, dB SPL
  Vector bin_freqs; // Hz
};

/// Downward shift of a masker's threshold relative to its own level.
inline double masking_offset(double bark) { return -6.025 - 0.275 * bark; }

/// Upper-slope steepness in dB per bark, level dependent.
inline double masker_gain(double level_db) {
  return -27.0 + 0.37 * std::max(level_db - 40.0, 0.0);
}

/// Spreading of masking from masker_bark to maskee_bark at the given
/// masker level, in dB relative to the masker's threshold peak.
double spread_function(double masker_bark, double maskee_bark,
                       double masker_level_db, const MaskConfig& cfg);

/// Per-bin data reused across frames of one bin grid.
class MaskingModel {
 public:
  MaskingModel(const Vector& bin_freqs, MaskConfig cfg);

  /// Global threshold per bin for one smoothed, normalized PSD frame:
  /// every bin acts as a masker, combined with ATH as a power sum.
  Vector threshold_row(const Vector& smoothed_frame) const;

  const Vector& bin_freqs() const { return freqs_; }
  const MaskConfig& config() const { return cfg_; }

 private:
  Vector freqs_;
  MaskConfig cfg_;
  ArrayX bark_;       // per bin
  ArrayX ath_power_;  // 10^(ATH/10) per bin; bin at 0 Hz borrows the next bin
  ArrayXX dz_;        // dz_(i, j) = bark_j - bark_i (masker i, maskee j)
};

/// Threshold matrix for every frame of a normalized+smoothed PSD spectrogram.
MaskingThresholds masking_thresholds(const Spectrogram& smoothed, const MaskConfig& cfg);

/// Zero/keep decision per cell: true means the bin survives.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_pattern(
    const Spectrogram& psd, const MaskConfig& cfg);

/// Zeroes magnitude cells whose normalized PSD lies below the global
/// masking threshold; surviving cells pass through untouched.
Spectrogram apply_freq_mask(const Spectrogram& spec, const MaskConfig& cfg,
                            int window_size);

/// Same zeroing rule on a power-domain channel spectrogram (gammatone
/// outputs), using the channel center frequencies for bark/ATH lookups.
Spectrogram apply_freq_mask_power(const Spectrogram& spec, const MaskConfig& cfg,
                                  int window_size);

}  // namespace aurafeat
