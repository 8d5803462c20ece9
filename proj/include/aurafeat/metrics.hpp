#pragma once

#include "aurafeat/features.hpp"
#include "aurafeat/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Evaluation metrics (WER, WERD, NWERD, SNR), controlled noise injection,
// and feature-space robustness probes.

namespace aurafeat {

struct Transcript {
  std::vector<std::string> words;
};

/// Whitespace split, case fold; optional punctuation stripping.
Transcript tokenize(const std::string& text, bool strip_punct = false);

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int total() const { return substitutions + insertions + deletions; }
};

EditCounts edit_counts(const Transcript& reference, const Transcript& hypothesis);

/// (S + I + D) / |reference|; may exceed 1.
double wer(const Transcript& reference, const Transcript& hypothesis);

inline double werd(double wer_clean, double wer_noisy) { return wer_noisy - wer_clean; }

double nwerd(double werd_value, double quality_score);

/// 10 log10 (signal power / noise power).
double snr_db(const AudioBuffer& signal, const AudioBuffer& noise);

/// Seeded standard-normal samples; Box-Muller on mt19937_64 uniforms so the
/// stream is identical across platforms.
Vector white_noise(Index length, std::uint64_t seed);

/// clean + g * noise with g chosen to hit the target SNR exactly. Noise is
/// tiled or truncated to the clean length.
AudioBuffer add_noise_at_snr(const AudioBuffer& clean, const AudioBuffer& noise,
                             double target_snr_db);

struct ProbeReport {
  FeatureKind feature_kind;
  double target_snr_db = 0.0;
  double achieved_snr_db = 0.0;
  double relative_distortion = 0.0;   // ||F(noisy)-F(clean)||_F / ||F(clean)||_F
  double changed_cell_fraction = 0.0; // |delta| > 1e-6
};

/// Injects seeded white noise at each target SNR and measures feature-space
/// distortion against the clean extraction.
std::vector<ProbeReport> probe_feature(const AudioBuffer& clean, const FeatureConfig& cfg,
                                       const std::vector<double>& snr_list,
                                       std::uint64_t seed);

}  // namespace aurafeat
