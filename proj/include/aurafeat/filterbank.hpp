#pragma once

#include "aurafeat/types.hpp"

// Mel, gammatone and difference-of-gammatone filterbanks sampled on the
// STFT bin grid, plus their application to spectrogram frames.

namespace aurafeat {

enum class FilterBankKind { mel, gammatone_norm, gammatone_sqnorm, dog };

struct FilterBank {
  Matrix weights;      // n_filters x n_bins
  Vector center_freqs; // Hz, strictly increasing
  FilterBankKind kind = FilterBankKind::mel;
  double alpha = 0.0;  // dog only

  Index n_filters() const { return weights.rows(); }
  Index n_bins() const { return weights.cols(); }
};

/// Triangular mel filterbank, rows normalized to sum 1. A filter whose
/// triangle is narrower than the bin spacing collapses to a single unit
/// weight at the bin nearest its center.
FilterBank mel_filterbank(int n_filters, int n_bins, int sample_rate,
                          double f_min, double f_max);

/// Sampled 4th-order gammatone magnitude responses at ERB-spaced centers.
/// squared=false: rows divided by their sum. squared=true: coefficients
/// squared first, then divided by the sum of squares.
FilterBank gammatone_filterbank(int n_filters, int n_bins, int sample_rate,
                                double f_min, double f_max, bool squared);

/// Difference-of-gammatones bank: G1 minus a copy with bandwidths scaled
/// by alpha, rows divided by the sum of their positive entries.
FilterBank dog_filterbank(int n_filters, int n_bins, int sample_rate,
                          double f_min, double f_max, double alpha);

/// Per-frame dot products against every filter row. Linear; no rectification.
Spectrogram apply_filterbank(const Spectrogram& spec, const FilterBank& fb);

const char* to_string(FilterBankKind k);

}  // namespace aurafeat
