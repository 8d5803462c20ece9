#pragma once

#include "aurafeat/features.hpp"
#include "aurafeat/types.hpp"

#include <string>

// WAV ingestion, feature serialization, and configuration loading.

namespace aurafeat {

enum class FeatureFileFormat { csv, afm1 };

/// RIFF/WAVE PCM (16/24-bit) or IEEE-float (32-bit). Multi-channel input is
/// downmixed by averaging; the sample rate is preserved.
AudioBuffer read_wav(const std::string& path);

/// 16-bit PCM mono writer, mainly for fixtures and round-trip checks.
void write_wav(const AudioBuffer& audio, const std::string& path);

void write_feature_matrix(const FeatureMatrix& matrix, const std::string& path,
                          FeatureFileFormat format);

FeatureMatrix read_feature_matrix(const std::string& path, FeatureFileFormat format);

/// Strict JSON config: unknown keys are rejected, missing keys take the
/// documented defaults.
FeatureConfig load_config(const std::string& path);
FeatureConfig parse_config(const std::string& json_text);

/// Fully resolved config echoed back as JSON, including notices for
/// paper-literal parameter choices.
std::string config_to_json(const FeatureConfig& cfg);

}  // namespace aurafeat
