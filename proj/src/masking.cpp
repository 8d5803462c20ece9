#include "aurafeat/masking.hpp"

#include "aurafeat/scales.hpp"

#include <cmath>

namespace aurafeat {

double spread_function(double masker_bark, double maskee_bark,
                       double masker_level_db, const MaskConfig& cfg) {
  const double dz = maskee_bark - masker_bark;
  switch (cfg.spread_convention) {
    case SpreadConvention::standard:
      return dz < 0.0 ? 27.0 * dz : masker_gain(masker_level_db) * dz;
    case SpreadConvention::paper_literal: {
      const double db = -dz;  // b(masker) - b(maskee)
      return db > 0.0 ? 27.0 * db : masker_gain(masker_level_db) * db;
    }
  }
  return 0.0;
}

MaskingModel::MaskingModel(const Vector& bin_freqs, MaskConfig cfg)
    : freqs_(bin_freqs), cfg_(cfg) {
  const Index n = freqs_.size();
  if (n < 1) throw std::invalid_argument("MaskingModel: empty bin grid");
  for (Index k = 1; k < n; ++k)
    if (freqs_[k] <= freqs_[k - 1])
      throw std::invalid_argument("MaskingModel: bin_freqs must be strictly increasing");

  bark_.resize(n);
  ath_power_.resize(n);
  for (Index k = 0; k < n; ++k) {
    bark_[k] = hz_to_bark(freqs_[k]);
    // ATH is undefined at 0 Hz; the DC bin borrows the first nonzero frequency.
    const double f = freqs_[k] > 0.0 ? freqs_[k] : freqs_[std::min<Index>(k + 1, n - 1)];
    ath_power_[k] = std::pow(10.0, ath_db(f) / 10.0);
  }

  dz_.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) dz_(i, j) = bark_[j] - bark_[i];
}

Vector MaskingModel::threshold_row(const Vector& frame) const {
  const Index n = freqs_.size();
  if (frame.size() != n)
    throw std::invalid_argument("threshold_row: frame length != bin count");

  const ArrayX level = frame.array();
  const ArrayX base = level - 6.025 - 0.275 * bark_;
  const ArrayX gain = -27.0 + 0.37 * (level - 40.0).max(0.0);

  // Row i carries masker i's threshold curve over all maskee bins j.
  ArrayXX sf(n, n);
  if (cfg_.spread_convention == SpreadConvention::standard)
    sf = (dz_ < 0.0).select(27.0 * dz_, dz_.colwise() * gain);
  else
    sf = (dz_ < 0.0).select(-27.0 * dz_, dz_.colwise() * (-gain));

  ArrayXX t_power = Eigen::exp(((sf.colwise() + base) * (std::numbers::ln10 / 10.0)));
  ArrayX combined = ath_power_ + t_power.colwise().sum().transpose();
  return (10.0 * combined.log10()).matrix();
}

MaskingThresholds masking_thresholds(const Spectrogram& smoothed, const MaskConfig& cfg) {
  smoothed.require_domain(SpectrogramDomain::normalized_psd_db, "masking_thresholds");
  MaskingModel model(smoothed.bin_freqs, cfg);
  MaskingThresholds out;
  out.bin_freqs = smoothed.bin_freqs;
  out.theta.resize(smoothed.frames(), smoothed.bins());
  for (Index f = 0; f < smoothed.frames(); ++f)
    out.theta.row(f) = model.threshold_row(smoothed.data.row(f).transpose()).transpose();
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_pattern(
    const Spectrogram& psd, const MaskConfig& cfg) {
  const Spectrogram norm = normalize_psd(psd);
  const Spectrogram smoothed = smooth_psd(norm);
  const MaskingThresholds thr = masking_thresholds(smoothed, cfg);
  return norm.data.array() >= thr.theta.array();
}

namespace {

Spectrogram apply_pattern(const Spectrogram& spec,
                          const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& keep) {
  Spectrogram out = spec;
  out.data = keep.select(spec.data.array(), 0.0);
  return out;
}

}  // namespace

Spectrogram apply_freq_mask(const Spectrogram& spec, const MaskConfig& cfg,
                            int window_size) {
  spec.require_domain(SpectrogramDomain::magnitude, "apply_freq_mask");
  return apply_pattern(spec, mask_pattern(psd_db(spec, window_size), cfg));
}

Spectrogram apply_freq_mask_power(const Spectrogram& spec, const MaskConfig& cfg,
                                  int window_size) {
  return apply_pattern(spec, mask_pattern(psd_db_from_power(spec, window_size), cfg));
}

}  // namespace aurafeat
