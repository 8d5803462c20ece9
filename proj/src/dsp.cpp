#include "aurafeat/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace aurafeat {

AudioBuffer pre_emphasize(const AudioBuffer& audio, double coeff) {
  if (coeff < 0.0 || coeff >= 1.0)
    throw std::invalid_argument("pre-emphasis coefficient must be in [0, 1)");
  const Vector& x = audio.samples;
  Vector y(x.size());
  y[0] = x[0];
  y.tail(x.size() - 1) = x.tail(x.size() - 1) - coeff * x.head(x.size() - 1);
  return AudioBuffer(std::move(y), audio.sample_rate);
}

Vector make_window(WindowKind kind, int length) {
  Vector w(length);
  const double step = 2.0 * std::numbers::pi / length;  // periodic window
  for (int n = 0; n < length; ++n) {
    switch (kind) {
      case WindowKind::hann:
        w[n] = 0.5 - 0.5 * std::cos(step * n);
        break;
      case WindowKind::hamming:
        w[n] = 0.54 - 0.46 * std::cos(step * n);
        break;
    }
  }
  return w;
}

Spectrogram stft(const AudioBuffer& audio, const StftConfig& cfg) {
  cfg.validate();
  const Index len = audio.length();
  if (len < cfg.win_length) throw std::invalid_argument("stft: input too short");

  const Index frames = 1 + (len - cfg.win_length) / cfg.hop_length;
  const Index bins = cfg.n_fft / 2 + 1;
  const Vector window = make_window(cfg.window, cfg.win_length);

  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<size_t>(cfg.n_fft), 0.0);
  std::vector<std::complex<double>> out(static_cast<size_t>(cfg.n_fft));

  Spectrogram spec;
  spec.domain = SpectrogramDomain::magnitude;
  spec.data.resize(frames, bins);
  spec.bin_freqs.resize(bins);
  for (Index k = 0; k < bins; ++k)
    spec.bin_freqs[k] = static_cast<double>(k) * audio.sample_rate / cfg.n_fft;

  for (Index f = 0; f < frames; ++f) {
    const Index start = f * cfg.hop_length;
    for (int n = 0; n < cfg.win_length; ++n)
      buf[static_cast<size_t>(n)] = audio.samples[start + n] * window[n];
    fft.fwd(out, buf);
    for (Index k = 0; k < bins; ++k)
      spec.data(f, k) = std::abs(out[static_cast<size_t>(k)]);
  }
  return spec;
}

Spectrogram power_spectrum(const Spectrogram& spec) {
  spec.require_domain(SpectrogramDomain::magnitude, "power_spectrum");
  Spectrogram out = spec;
  out.data = spec.data.array().square();
  out.domain = SpectrogramDomain::power;
  return out;
}

namespace {

Spectrogram psd_common(const Spectrogram& spec, double scale) {
  // scale converts a cell into linear power relative to the window size.
  const double floor_lin = std::pow(10.0, kPsdFloorDb / 10.0);
  Spectrogram out = spec;
  out.data = (spec.data.array() * scale).square().max(floor_lin).log10() * 10.0;
  out.domain = SpectrogramDomain::psd_db;
  return out;
}

}  // namespace

Spectrogram psd_db(const Spectrogram& spec, int window_size) {
  spec.require_domain(SpectrogramDomain::magnitude, "psd_db");
  if (window_size <= 0) throw std::invalid_argument("psd_db: window size must be positive");
  const double floor_lin = std::pow(10.0, kPsdFloorDb / 10.0);
  Spectrogram out = spec;
  out.data = ((spec.data.array() / window_size).square()).max(floor_lin).log10() * 10.0;
  out.domain = SpectrogramDomain::psd_db;
  return out;
}

Spectrogram psd_db_from_power(const Spectrogram& spec, int window_size) {
  if (spec.domain != SpectrogramDomain::power && spec.domain != SpectrogramDomain::feature)
    throw std::invalid_argument("psd_db_from_power: expected power-domain values");
  if (window_size <= 0)
    throw std::invalid_argument("psd_db_from_power: window size must be positive");
  const double n2 = static_cast<double>(window_size) * window_size;
  const double floor_lin = std::pow(10.0, kPsdFloorDb / 10.0);
  Spectrogram out = spec;
  out.data = (spec.data.array() / n2).max(floor_lin).log10() * 10.0;
  out.domain = SpectrogramDomain::psd_db;
  return out;
}

Spectrogram normalize_psd(const Spectrogram& spec) {
  spec.require_domain(SpectrogramDomain::psd_db, "normalize_psd");
  Spectrogram out = spec;
  const Vector frame_max = spec.data.rowwise().maxCoeff();
  out.data = spec.data.array().colwise() + (kSplReferenceDb - frame_max.array());
  out.domain = SpectrogramDomain::normalized_psd_db;
  return out;
}

Spectrogram smooth_psd(const Spectrogram& spec) {
  spec.require_domain(SpectrogramDomain::normalized_psd_db, "smooth_psd");
  const Index bins = spec.bins();
  ArrayXX p = Eigen::pow(10.0, spec.data.array() / 10.0);
  ArrayXX acc = p;
  acc.leftCols(bins - 1) += p.rightCols(bins - 1);   // neighbor k+1
  acc.rightCols(bins - 1) += p.leftCols(bins - 1);   // neighbor k-1
  Spectrogram out = spec;
  out.data = 10.0 * acc.log10();
  return out;
}

}  // namespace aurafeat
