#include "aurafeat/pnc.hpp"

#include "aurafeat/dsp.hpp"

#include <cmath>

namespace aurafeat {

ChannelPowerMatrix short_time_power(const AudioBuffer& audio, const StftConfig& cfg,
                                    const FilterBank& fb) {
  if (fb.kind != FilterBankKind::gammatone_sqnorm)
    throw std::invalid_argument("short_time_power: requires a squared-normalized gammatone bank");
  const Spectrogram power = power_spectrum(stft(audio, cfg));
  const Spectrogram filtered = apply_filterbank(power, fb);
  return {filtered.data, PncStage::P};
}

ChannelPowerMatrix medium_time_power(const ChannelPowerMatrix& p, int m_window) {
  if (m_window < 0) throw std::invalid_argument("medium_time_power: M >= 0");
  const Index frames = p.data.rows();
  ChannelPowerMatrix q{Matrix(frames, p.data.cols()), PncStage::Q};
  for (Index m = 0; m < frames; ++m) {
    const Index lo = std::max<Index>(0, m - m_window);
    const Index hi = std::min<Index>(frames - 1, m + m_window);
    q.data.row(m) = p.data.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return q;
}

ChannelPowerMatrix asymmetric_noise_suppression(const ChannelPowerMatrix& q,
                                                const PncConfig& cfg) {
  cfg.validate();
  const Index frames = q.data.rows();
  const Index channels = q.data.cols();
  Matrix q_le(frames, channels);
  // Lower-envelope tracker: rises slowly (lambda_a), falls fast (lambda_b).
  Vector prev = 0.9 * q.data.row(0).transpose();
  for (Index m = 0; m < frames; ++m) {
    for (Index l = 0; l < channels; ++l) {
      const double lam = q.data(m, l) >= prev[l] ? cfg.lambda_a : cfg.lambda_b;
      prev[l] = lam * prev[l] + (1.0 - lam) * q.data(m, l);
    }
    q_le.row(m) = prev.transpose();
  }
  ChannelPowerMatrix q0{(q.data - q_le).cwiseMax(0.0), PncStage::Q_0};
  return q0;
}

ChannelPowerMatrix temporal_masking(const ChannelPowerMatrix& q0, const PncConfig& cfg) {
  cfg.validate();
  const Index frames = q0.data.rows();
  const Index channels = q0.data.cols();
  ChannelPowerMatrix r{Matrix(frames, channels), PncStage::R};
  Vector peak = Vector::Zero(channels);  // Q_p[-1] = 0: first frame passes through
  for (Index m = 0; m < frames; ++m) {
    for (Index l = 0; l < channels; ++l) {
      const double v = q0.data(m, l);
      r.data(m, l) = v >= cfg.lambda_t * peak[l] ? v : cfg.mu_t * peak[l];
      peak[l] = std::max(cfg.lambda_t * peak[l], v);
    }
  }
  return r;
}

ChannelPowerMatrix weight_smoothing(const ChannelPowerMatrix& r, const ChannelPowerMatrix& q,
                                    const ChannelPowerMatrix& p, int neighbors) {
  if (r.data.rows() != q.data.rows() || r.data.cols() != q.data.cols() ||
      p.data.rows() != r.data.rows() || p.data.cols() != r.data.cols())
    throw std::invalid_argument("weight_smoothing: shape mismatch");
  const Index channels = r.data.cols();
  const ArrayXX ratio = r.data.array() / q.data.array().max(kPncRatioFloor);
  Matrix smoothed(ratio.rows(), channels);
  for (Index l = 0; l < channels; ++l) {
    const Index lo = std::max<Index>(0, l - neighbors);
    const Index hi = std::min<Index>(channels - 1, l + neighbors);
    smoothed.col(l) = ratio.middleCols(lo, hi - lo + 1).rowwise().mean();
  }
  return {p.data.cwiseProduct(smoothed), PncStage::T};
}

ChannelPowerMatrix mean_power_normalize(const ChannelPowerMatrix& t) {
  const Index frames = t.data.rows();
  ChannelPowerMatrix u{Matrix(frames, t.data.cols()), PncStage::U};
  double mu = t.data.row(0).mean();  // seed the running mean with the first frame
  constexpr double kLambdaMu = 0.999;
  for (Index m = 0; m < frames; ++m) {
    mu = kLambdaMu * mu + (1.0 - kLambdaMu) * t.data.row(m).mean();
    u.data.row(m) = t.data.row(m) / std::max(mu, kPncRatioFloor);
  }
  return u;
}

Spectrogram rate_level(const ChannelPowerMatrix& u, double exponent, const Vector& center_freqs) {
  if ((u.data.array() < 0.0).any())
    throw std::invalid_argument("rate_level: negative channel power");
  Spectrogram out;
  out.data = u.data.array().pow(exponent);
  out.bin_freqs = center_freqs;
  out.domain = SpectrogramDomain::feature;
  return out;
}

}  // namespace aurafeat
