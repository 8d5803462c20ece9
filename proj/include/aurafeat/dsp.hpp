#pragma once

#include "aurafeat/types.hpp"

// Time-domain preprocessing, STFT, and PSD transforms feeding the masking
// model. All operations are pure functions of their inputs.

namespace aurafeat {

// Floor for zero-magnitude PSD cells, in dB.
inline constexpr double kPsdFloorDb = -200.0;

// Per-frame SPL reference the normalized PSD is pinned to.
inline constexpr double kSplReferenceDb = 96.0;

/// out[0] = in[0]; out[t] = in[t] - coeff * in[t-1].
AudioBuffer pre_emphasize(const AudioBuffer& audio, double coeff);

Vector make_window(WindowKind kind, int length);

/// Magnitude STFT. frames = 1 + (len - win) / hop, bins = n_fft/2 + 1,
/// bin_freqs[k] = k * sample_rate / n_fft.
Spectrogram stft(const AudioBuffer& audio, const StftConfig& cfg);

/// Elementwise square of a magnitude spectrogram.
Spectrogram power_spectrum(const Spectrogram& spec);

/// p(k) = 10 log10 (mag / n)^2 with zero magnitudes clamped to kPsdFloorDb.
Spectrogram psd_db(const Spectrogram& spec, int window_size);

/// Same PSD but from power-domain values: 10 log10 (pow / n^2).
Spectrogram psd_db_from_power(const Spectrogram& spec, int window_size);

/// Per frame: 96 - max_k p(k) + p(k).
Spectrogram normalize_psd(const Spectrogram& spec);

/// dB-domain sum of each bin with its two neighbors; boundary bins omit
/// the missing neighbor.
Spectrogram smooth_psd(const Spectrogram& spec);

}  // namespace aurafeat
