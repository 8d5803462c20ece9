#include "aurafeat/filterbank.hpp"

#include "aurafeat/scales.hpp"

#include <cmath>

namespace aurafeat {

namespace {

void check_range(int n_filters, int n_bins, int sample_rate, double f_min, double f_max) {
  if (n_filters < 1) throw std::invalid_argument("filterbank: n_filters must be >= 1");
  if (n_bins < 2) throw std::invalid_argument("filterbank: n_bins must be >= 2");
  if (sample_rate <= 0) throw std::invalid_argument("filterbank: sample_rate must be positive");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0))
    throw std::invalid_argument("filterbank: require 0 <= f_min < f_max <= nyquist");
}

Vector bin_grid(int n_bins, int sample_rate) {
  // Bin spacing matches an n_fft of 2*(n_bins-1).
  const int n_fft = 2 * (n_bins - 1);
  Vector f(n_bins);
  for (int k = 0; k < n_bins; ++k)
    f[k] = static_cast<double>(k) * sample_rate / n_fft;
  return f;
}

Vector erb_spaced_centers(int n_filters, double f_min, double f_max) {
  const double r0 = hz_to_erb_rate(f_min);
  const double r1 = hz_to_erb_rate(f_max);
  Vector c(n_filters);
  if (n_filters == 1) {
    c[0] = erb_rate_to_hz(0.5 * (r0 + r1));
    return c;
  }
  for (int i = 0; i < n_filters; ++i)
    c[i] = erb_rate_to_hz(r0 + (r1 - r0) * i / (n_filters - 1));
  return c;
}

// 4th-order gammatone magnitude response sampled at f, with the -3 dB
// bandwidth pinned to 1.019 * ERB(fc).
double gammatone_response(double f, double fc, double bw_scale) {
  static const double half_width = std::sqrt(std::pow(2.0, 0.25) - 1.0);
  const double b = bw_scale * 1.019 * erb_bandwidth(fc) / (2.0 * half_width);
  const double u = (f - fc) / b;
  return std::pow(1.0 + u * u, -2.0);
}

Matrix raw_gammatone_rows(const Vector& centers, const Vector& freqs, double bw_scale) {
  Matrix w(centers.size(), freqs.size());
  for (Index i = 0; i < centers.size(); ++i)
    for (Index j = 0; j < freqs.size(); ++j)
      w(i, j) = gammatone_response(freqs[j], centers[i], bw_scale);
  return w;
}

void normalize_rows_to_unit_sum(Matrix& w) {
  for (Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
}

}  // namespace

FilterBank mel_filterbank(int n_filters, int n_bins, int sample_rate,
                          double f_min, double f_max) {
  check_range(n_filters, n_bins, sample_rate, f_min, f_max);
  const Vector freqs = bin_grid(n_bins, sample_rate);
  const double m_lo = hz_to_mel(f_min);
  const double m_hi = hz_to_mel(f_max);

  Vector edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i)
    edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * i / (n_filters + 1));

  FilterBank fb;
  fb.kind = FilterBankKind::mel;
  fb.center_freqs = edges.segment(1, n_filters);
  fb.weights = Matrix::Zero(n_filters, n_bins);
  for (int i = 0; i < n_filters; ++i) {
    const double lo = edges[i], c = edges[i + 1], hi = edges[i + 2];
    for (int j = 0; j < n_bins; ++j) {
      const double f = freqs[j];
      if (f > lo && f < c)
        fb.weights(i, j) = (f - lo) / (c - lo);
      else if (f >= c && f < hi)
        fb.weights(i, j) = (hi - f) / (hi - c);
    }
    double s = fb.weights.row(i).sum();
    if (s <= 0.0) {
      // Triangle fell between bins; keep the filter alive at the nearest bin.
      Index nearest;
      (freqs.array() - c).abs().minCoeff(&nearest);
      fb.weights(i, nearest) = 1.0;
      s = 1.0;
    }
    fb.weights.row(i) /= s;
  }
  return fb;
}

FilterBank gammatone_filterbank(int n_filters, int n_bins, int sample_rate,
                                double f_min, double f_max, bool squared) {
  check_range(n_filters, n_bins, sample_rate, f_min, f_max);
  const Vector freqs = bin_grid(n_bins, sample_rate);

  FilterBank fb;
  fb.kind = squared ? FilterBankKind::gammatone_sqnorm : FilterBankKind::gammatone_norm;
  fb.center_freqs = erb_spaced_centers(n_filters, f_min, f_max);
  fb.weights = raw_gammatone_rows(fb.center_freqs, freqs, 1.0);
  if (squared) fb.weights = fb.weights.array().square();
  normalize_rows_to_unit_sum(fb.weights);
  return fb;
}

FilterBank dog_filterbank(int n_filters, int n_bins, int sample_rate,
                          double f_min, double f_max, double alpha) {
  check_range(n_filters, n_bins, sample_rate, f_min, f_max);
  if (alpha <= 1.0)
    throw std::invalid_argument("dog_filterbank: surround must be wider than center (alpha > 1)");
  const Vector freqs = bin_grid(n_bins, sample_rate);
  const Vector centers = erb_spaced_centers(n_filters, f_min, f_max);

  Matrix g1 = raw_gammatone_rows(centers, freqs, 1.0);
  Matrix ga = raw_gammatone_rows(centers, freqs, alpha);
  normalize_rows_to_unit_sum(g1);
  normalize_rows_to_unit_sum(ga);

  FilterBank fb;
  fb.kind = FilterBankKind::dog;
  fb.alpha = alpha;
  fb.center_freqs = centers;
  fb.weights = g1 - ga;
  for (Index i = 0; i < fb.weights.rows(); ++i) {
    const double pos_sum = fb.weights.row(i).array().max(0.0).sum();
    fb.weights.row(i) /= pos_sum;
  }
  return fb;
}

Spectrogram apply_filterbank(const Spectrogram& spec, const FilterBank& fb) {
  if (spec.bins() != fb.n_bins())
    throw std::invalid_argument("apply_filterbank: bin count mismatch");
  Spectrogram out;
  out.data.noalias() = spec.data * fb.weights.transpose();
  out.bin_freqs = fb.center_freqs;
  out.domain = SpectrogramDomain::feature;
  return out;
}

const char* to_string(FilterBankKind k) {
  switch (k) {
    case FilterBankKind::mel: return "mel";
    case FilterBankKind::gammatone_norm: return "gammatone_norm";
    case FilterBankKind::gammatone_sqnorm: return "gammatone_sqnorm";
    case FilterBankKind::dog: return "dog";
  }
  return "?";
}

}  // namespace aurafeat
