#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aurafeat {

using Real = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ArrayX = Eigen::ArrayXd;
using ArrayXX = Eigen::ArrayXXd;
using Index = Eigen::Index;

/// Mono PCM audio, samples in [-1, 1].
struct AudioBuffer {
  Vector samples;
  int sample_rate = 16000;

  AudioBuffer() = default;
  AudioBuffer(Vector s, int rate) : samples(std::move(s)), sample_rate(rate) {
    if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
    if (samples.size() < 1) throw std::invalid_argument("audio must contain at least one sample");
    if (!samples.allFinite()) throw std::invalid_argument("audio samples must be finite");
  }

  Index length() const { return samples.size(); }
};

enum class WindowKind { hann, hamming };

struct StftConfig {
  int win_length = 400;
  int hop_length = 160;
  int n_fft = 400;
  WindowKind window = WindowKind::hann;

  void validate() const {
    if (hop_length <= 0 || hop_length > win_length || win_length > n_fft)
      throw std::invalid_argument("StftConfig requires 0 < hop_length <= win_length <= n_fft");
  }
};

enum class SpectrogramDomain { magnitude, power, psd_db, normalized_psd_db, feature };

/// frames x bins real matrix tagged with its value domain.
struct Spectrogram {
  Matrix data;        // frames x bins
  Vector bin_freqs;   // Hz per column
  SpectrogramDomain domain = SpectrogramDomain::magnitude;

  Index frames() const { return data.rows(); }
  Index bins() const { return data.cols(); }

  void require_domain(SpectrogramDomain d, const char* op) const {
    if (domain != d)
      throw std::invalid_argument(std::string(op) + ": spectrogram domain mismatch");
  }
};

inline const char* to_string(SpectrogramDomain d) {
  switch (d) {
    case SpectrogramDomain::magnitude: return "magnitude";
    case SpectrogramDomain::power: return "power";
    case SpectrogramDomain::psd_db: return "psd_db";
    case SpectrogramDomain::normalized_psd_db: return "normalized_psd_db";
    case SpectrogramDomain::feature: return "feature";
  }
  return "?";
}

}  // namespace aurafeat
