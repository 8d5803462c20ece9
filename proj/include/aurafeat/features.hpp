#pragma once

#include "aurafeat/masking.hpp"
#include "aurafeat/pnc.hpp"
#include "aurafeat/types.hpp"

#include <map>
#include <optional>
#include <string>

// The nine feature pipelines assembled from the building blocks.

namespace aurafeat {

enum class FeatureKind {
  LogSpec = 0,
  LogMelSpec,
  MFCC,
  GammSpec,
  FreqMask,
  GammFreqMask,
  PNC,
  PNCC,
  DoGSpec,
};

inline constexpr int kFeatureKindCount = 9;

const char* to_string(FeatureKind k);
std::optional<FeatureKind> feature_kind_from_string(const std::string& name);

struct FeatureConfig {
  FeatureKind kind = FeatureKind::LogMelSpec;
  int sample_rate = 16000;
  StftConfig stft;
  int n_filters = 80;
  int n_ceps = 80;           // MFCC/PNCC output dims
  double f_min = 20.0;
  double f_max = 0.0;        // 0 means sample_rate / 2
  double dog_alpha = 2.0;
  double pre_emph = 0.97;
  double log_floor = 1e-10;
  MaskConfig mask;
  PncConfig pnc;

  double effective_f_max() const { return f_max > 0.0 ? f_max : sample_rate / 2.0; }
  void validate() const;
};

struct FeatureMatrix {
  Matrix data;  // frames x dims
  FeatureKind kind = FeatureKind::LogMelSpec;
  std::string fingerprint;  // hash of the resolved FeatureConfig
};

/// 64-bit FNV-1a over the canonical textual form of the config, hex encoded.
std::string config_fingerprint(const FeatureConfig& cfg);

/// Orthonormal DCT-II, first n_out coefficients.
Vector dct_ii(const Vector& row, int n_out);

/// Inverse of the orthonormal DCT-II (DCT-III), full length only.
Vector dct_iii(const Vector& coeffs);

FeatureMatrix extract(const AudioBuffer& audio, const FeatureConfig& cfg);

/// All nine kinds; each entry equals the standalone extract output bitwise.
std::map<FeatureKind, FeatureMatrix> extract_all(const AudioBuffer& audio,
                                                 const FeatureConfig& base_cfg);

}  // namespace aurafeat
