#include "aurafeat/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace aurafeat {

Transcript tokenize(const std::string& text, bool strip_punct) {
  Transcript t;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::string w;
    for (char c : tok) {
      if (strip_punct && std::ispunct(static_cast<unsigned char>(c))) continue;
      w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (!w.empty()) t.words.push_back(std::move(w));
  }
  return t;
}

EditCounts edit_counts(const Transcript& reference, const Transcript& hypothesis) {
  const auto& r = reference.words;
  const auto& h = hypothesis.words;
  const size_t nr = r.size(), nh = h.size();

  // cost[i][j]: min edits aligning r[0..i) with h[0..j); backtrace for S/I/D split.
  std::vector<std::vector<int>> cost(nr + 1, std::vector<int>(nh + 1));
  for (size_t i = 0; i <= nr; ++i) cost[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= nh; ++j) cost[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= nr; ++i)
    for (size_t j = 1; j <= nh; ++j) {
      const int sub = cost[i - 1][j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1);
      cost[i][j] = std::min({sub, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }

  EditCounts counts;
  size_t i = nr, j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && cost[i][j] == cost[i - 1][j - 1] && r[i - 1] == h[j - 1]) {
      --i; --j;
    } else if (i > 0 && j > 0 && cost[i][j] == cost[i - 1][j - 1] + 1) {
      ++counts.substitutions; --i; --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++counts.deletions; --i;
    } else {
      ++counts.insertions; --j;
    }
  }
  return counts;
}

double wer(const Transcript& reference, const Transcript& hypothesis) {
  if (reference.words.empty()) throw std::invalid_argument("wer: empty reference");
  return static_cast<double>(edit_counts(reference, hypothesis).total()) /
         static_cast<double>(reference.words.size());
}

double nwerd(double werd_value, double quality_score) {
  if (!(quality_score > 0.0)) throw std::invalid_argument("nwerd: quality score must be positive");
  return werd_value / quality_score;
}

double snr_db(const AudioBuffer& signal, const AudioBuffer& noise) {
  if (signal.length() != noise.length())
    throw std::invalid_argument("snr_db: length mismatch");
  const double pn = noise.samples.squaredNorm();
  if (pn == 0.0) throw std::invalid_argument("snr_db: zero-energy noise, infinite SNR");
  return 10.0 * std::log10(signal.samples.squaredNorm() / pn);
}

Vector white_noise(Index length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Box-Muller on (0, 1] uniforms; the second variate of each pair is kept.
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
  };
  Vector out(length);
  for (Index i = 0; i < length; i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[i] = radius * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < length) out[i + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
  }
  return out;
}

AudioBuffer add_noise_at_snr(const AudioBuffer& clean, const AudioBuffer& noise,
                             double target_snr_db) {
  if (!(target_snr_db >= -40.0 && target_snr_db <= 1000.0))
    throw std::invalid_argument("add_noise_at_snr: target SNR out of bounds [-40, 1000] dB");
  const double pc = clean.samples.squaredNorm();
  if (pc == 0.0) throw std::invalid_argument("add_noise_at_snr: zero-energy clean signal");

  Vector n(clean.length());
  for (Index i = 0; i < clean.length(); ++i) n[i] = noise.samples[i % noise.length()];
  const double pn = n.squaredNorm();
  if (pn == 0.0) throw std::invalid_argument("add_noise_at_snr: zero-energy noise");

  const double gain = std::sqrt(pc / pn) * std::pow(10.0, -target_snr_db / 20.0);
  return AudioBuffer(clean.samples + gain * n, clean.sample_rate);
}

std::vector<ProbeReport> probe_feature(const AudioBuffer& clean, const FeatureConfig& cfg,
                                       const std::vector<double>& snr_list,
                                       std::uint64_t seed) {
  const FeatureMatrix ref = extract(clean, cfg);
  const double ref_norm = ref.data.norm();
  const Vector noise_samples = white_noise(clean.length(), seed);
  const AudioBuffer noise(noise_samples, clean.sample_rate);

  std::vector<ProbeReport> reports;
  reports.reserve(snr_list.size());
  for (double target : snr_list) {
    const AudioBuffer noisy = add_noise_at_snr(clean, noise, target);
    AudioBuffer delta(noisy.samples - clean.samples, clean.sample_rate);
    const FeatureMatrix out = extract(noisy, cfg);

    ProbeReport rep;
    rep.feature_kind = cfg.kind;
    rep.target_snr_db = target;
    rep.achieved_snr_db = snr_db(clean, delta);
    const double diff = (out.data - ref.data).norm();
    rep.relative_distortion = ref_norm > 0.0 ? diff / ref_norm : diff;
    rep.changed_cell_fraction =
        static_cast<double>(((out.data - ref.data).array().abs() > 1e-6).count()) /
        static_cast<double>(ref.data.size());
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace aurafeat
