#include "aurafeat/features.hpp"

#include "aurafeat/dsp.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>

namespace aurafeat {

const char* to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::LogSpec: return "logspec";
    case FeatureKind::LogMelSpec: return "logmelspec";
    case FeatureKind::MFCC: return "mfcc";
    case FeatureKind::GammSpec: return "gammspec";
    case FeatureKind::FreqMask: return "freqmask";
    case FeatureKind::GammFreqMask: return "gammfreqmask";
    case FeatureKind::PNC: return "pnc";
    case FeatureKind::PNCC: return "pncc";
    case FeatureKind::DoGSpec: return "dogspec";
  }
  return "?";
}

std::optional<FeatureKind> feature_kind_from_string(const std::string& name) {
  for (int i = 0; i < kFeatureKindCount; ++i) {
    const auto k = static_cast<FeatureKind>(i);
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

void FeatureConfig::validate() const {
  stft.validate();
  pnc.validate();
  if (sample_rate <= 0) throw std::invalid_argument("config: sample_rate must be positive");
  if (n_filters < 1) throw std::invalid_argument("config: n_filters must be >= 1");
  if (n_ceps < 1 || n_ceps > n_filters)
    throw std::invalid_argument("config: require 1 <= n_ceps <= n_filters");
  if (!(f_min >= 0.0 && f_min < effective_f_max() && effective_f_max() <= sample_rate / 2.0))
    throw std::invalid_argument("config: require 0 <= f_min < f_max <= nyquist");
  if (!(dog_alpha > 1.0)) throw std::invalid_argument("config: dog_alpha must be > 1");
  if (!(pre_emph >= 0.0 && pre_emph < 1.0))
    throw std::invalid_argument("config: pre_emph must be in [0, 1)");
  if (!(log_floor > 0.0)) throw std::invalid_argument("config: log_floor must be positive");
}

std::string config_fingerprint(const FeatureConfig& cfg) {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "kind=%s sr=%d win=%d hop=%d nfft=%d window=%d nf=%d nc=%d "
                "fmin=%.17g fmax=%.17g alpha=%.17g pre=%.17g floor=%.17g "
                "spread=%d M=%d lt=%.17g mt=%.17g la=%.17g lb=%.17g N=%d exp=%.17g",
                to_string(cfg.kind), cfg.sample_rate, cfg.stft.win_length,
                cfg.stft.hop_length, cfg.stft.n_fft, static_cast<int>(cfg.stft.window),
                cfg.n_filters, cfg.n_ceps, cfg.f_min, cfg.effective_f_max(), cfg.dog_alpha,
                cfg.pre_emph, cfg.log_floor, static_cast<int>(cfg.mask.spread_convention),
                cfg.pnc.m_window, cfg.pnc.lambda_t, cfg.pnc.mu_t, cfg.pnc.lambda_a,
                cfg.pnc.lambda_b, cfg.pnc.smooth_neighbors, cfg.pnc.power_exponent);
  std::uint64_t h = 14695981039346656037ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

Vector dct_ii(const Vector& row, int n_out) {
  const Index n = row.size();
  if (n_out < 0 || n_out > n) throw std::invalid_argument("dct_ii: n_out > input length");
  Vector out(n_out);
  const double scale0 = std::sqrt(1.0 / n);
  const double scale = std::sqrt(2.0 / n);
  for (int k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i)
      acc += row[i] * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    out[k] = (k == 0 ? scale0 : scale) * acc;
  }
  return out;
}

Vector dct_iii(const Vector& coeffs) {
  const Index n = coeffs.size();
  Vector out(n);
  const double scale0 = std::sqrt(1.0 / n);
  const double scale = std::sqrt(2.0 / n);
  for (Index i = 0; i < n; ++i) {
    double acc = scale0 * coeffs[0];
    for (Index k = 1; k < n; ++k)
      acc += scale * coeffs[k] * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    out[i] = acc;
  }
  return out;
}

namespace {

struct StftCache {
  std::optional<Spectrogram> plain;      // STFT of the raw audio
  std::optional<Spectrogram> emphasized; // STFT after pre-emphasis
};

const Spectrogram& plain_stft(const AudioBuffer& audio, const FeatureConfig& cfg,
                              StftCache& cache) {
  if (!cache.plain) cache.plain = stft(audio, cfg.stft);
  return *cache.plain;
}

const Spectrogram& emphasized_stft(const AudioBuffer& audio, const FeatureConfig& cfg,
                                   StftCache& cache) {
  if (!cache.emphasized)
    cache.emphasized = stft(pre_emphasize(audio, cfg.pre_emph), cfg.stft);
  return *cache.emphasized;
}

Matrix log_floor_apply(const Matrix& m, double floor) {
  return m.array().max(floor).log();
}

Matrix cube_root(const Matrix& m) { return m.array().max(0.0).pow(1.0 / 3.0); }

Matrix dct_rows(const Matrix& m, int n_out) {
  Matrix out(m.rows(), n_out);
  for (Index f = 0; f < m.rows(); ++f)
    out.row(f) = dct_ii(m.row(f).transpose(), n_out).transpose();
  return out;
}

Matrix log_mel_matrix(const AudioBuffer& audio, const FeatureConfig& cfg, StftCache& cache) {
  const FilterBank fb = mel_filterbank(cfg.n_filters, cfg.stft.n_fft / 2 + 1,
                                       cfg.sample_rate, cfg.f_min, cfg.effective_f_max());
  const Spectrogram power = power_spectrum(plain_stft(audio, cfg, cache));
  return log_floor_apply(apply_filterbank(power, fb).data, cfg.log_floor);
}

Matrix pnc_matrix(const AudioBuffer& audio, const FeatureConfig& cfg, StftCache& cache) {
  const int n_bins = cfg.stft.n_fft / 2 + 1;
  const FilterBank fb = gammatone_filterbank(cfg.n_filters, n_bins, cfg.sample_rate,
                                             cfg.f_min, cfg.effective_f_max(), true);
  const Spectrogram power = power_spectrum(emphasized_stft(audio, cfg, cache));
  ChannelPowerMatrix p{apply_filterbank(power, fb).data, PncStage::P};
  const ChannelPowerMatrix q = medium_time_power(p, cfg.pnc.m_window);
  const ChannelPowerMatrix q0 = asymmetric_noise_suppression(q, cfg.pnc);
  const ChannelPowerMatrix r = temporal_masking(q0, cfg.pnc);
  const ChannelPowerMatrix t = weight_smoothing(r, q, p, cfg.pnc.smooth_neighbors);
  const ChannelPowerMatrix u = mean_power_normalize(t);
  return rate_level(u, cfg.pnc.power_exponent, fb.center_freqs).data;
}

Matrix extract_matrix(const AudioBuffer& audio, const FeatureConfig& cfg, StftCache& cache) {
  const int n_bins = cfg.stft.n_fft / 2 + 1;
  switch (cfg.kind) {
    case FeatureKind::LogSpec:
      return log_floor_apply(power_spectrum(plain_stft(audio, cfg, cache)).data, cfg.log_floor);
    case FeatureKind::LogMelSpec:
      return log_mel_matrix(audio, cfg, cache);
    case FeatureKind::MFCC:
      return dct_rows(log_mel_matrix(audio, cfg, cache), cfg.n_ceps);
    case FeatureKind::GammSpec: {
      const FilterBank fb = gammatone_filterbank(cfg.n_filters, n_bins, cfg.sample_rate,
                                                 cfg.f_min, cfg.effective_f_max(), false);
      const Spectrogram power = power_spectrum(plain_stft(audio, cfg, cache));
      return cube_root(apply_filterbank(power, fb).data);
    }
    case FeatureKind::FreqMask: {
      const Spectrogram masked =
          apply_freq_mask(plain_stft(audio, cfg, cache), cfg.mask, cfg.stft.win_length);
      return cube_root(power_spectrum(masked).data);
    }
    case FeatureKind::GammFreqMask: {
      const FilterBank fb = gammatone_filterbank(cfg.n_filters, n_bins, cfg.sample_rate,
                                                 cfg.f_min, cfg.effective_f_max(), false);
      const Spectrogram power = power_spectrum(plain_stft(audio, cfg, cache));
      const Spectrogram channels = apply_filterbank(power, fb);
      return cube_root(
          apply_freq_mask_power(channels, cfg.mask, cfg.stft.win_length).data);
    }
    case FeatureKind::PNC:
      return pnc_matrix(audio, cfg, cache);
    case FeatureKind::PNCC:
      return dct_rows(pnc_matrix(audio, cfg, cache), cfg.n_ceps);
    case FeatureKind::DoGSpec: {
      const FilterBank fb = dog_filterbank(cfg.n_filters, n_bins, cfg.sample_rate,
                                           cfg.f_min, cfg.effective_f_max(), cfg.dog_alpha);
      const Spectrogram power = power_spectrum(emphasized_stft(audio, cfg, cache));
      return cube_root(apply_filterbank(power, fb).data);
    }
  }
  throw std::logic_error("extract: unknown feature kind");
}

}  // namespace

FeatureMatrix extract(const AudioBuffer& audio, const FeatureConfig& cfg) {
  cfg.validate();
  if (audio.sample_rate != cfg.sample_rate)
    throw std::invalid_argument("extract: audio sample rate does not match config (no resampling)");
  StftCache cache;
  FeatureMatrix out;
  out.kind = cfg.kind;
  out.fingerprint = config_fingerprint(cfg);
  out.data = extract_matrix(audio, cfg, cache);
  if (!out.data.allFinite()) throw std::runtime_error("extract: non-finite feature values");
  return out;
}

std::map<FeatureKind, FeatureMatrix> extract_all(const AudioBuffer& audio,
                                                 const FeatureConfig& base_cfg) {
  StftCache cache;
  std::map<FeatureKind, FeatureMatrix> out;
  for (int i = 0; i < kFeatureKindCount; ++i) {
    FeatureConfig cfg = base_cfg;
    cfg.kind = static_cast<FeatureKind>(i);
    cfg.validate();
    if (audio.sample_rate != cfg.sample_rate)
      throw std::invalid_argument("extract_all: audio sample rate does not match config");
    FeatureMatrix fm;
    fm.kind = cfg.kind;
    fm.fingerprint = config_fingerprint(cfg);
    fm.data = extract_matrix(audio, cfg, cache);
    if (!fm.data.allFinite()) throw std::runtime_error("extract_all: non-finite feature values");
    out.emplace(cfg.kind, std::move(fm));
  }
  return out;
}

}  // namespace aurafeat
