#include "aurafeat/audio_io.hpp"
#include "aurafeat/dsp.hpp"
#include "aurafeat/features.hpp"
#include "aurafeat/filterbank.hpp"
#include "aurafeat/masking.hpp"
#include "aurafeat/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace aurafeat;

namespace {

int thread_count(int requested) {
  if (const char* env = std::getenv("AURAFEAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Inputs may be files or directories; directories contribute their *.wav
// entries in lexicographic order.
std::vector<fs::path> collect_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".wav") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw std::invalid_argument("no input files");
  return out;
}

void atomic_write(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << contents;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

void atomic_write_feature(const FeatureMatrix& m, const fs::path& path,
                          FeatureFileFormat format) {
  const fs::path tmp = path.string() + ".tmp";
  write_feature_matrix(m, tmp.string(), format);
  fs::rename(tmp, path);
}

FeatureFileFormat parse_format(const std::string& s) {
  if (s == "csv") return FeatureFileFormat::csv;
  if (s == "afm1") return FeatureFileFormat::afm1;
  throw std::invalid_argument("unknown output format '" + s + "'");
}

fs::path output_path(const fs::path& out, const fs::path& input, bool multi,
                     const std::string& suffix) {
  if (!multi && !fs::is_directory(out)) return out;
  return out / (input.stem().string() + suffix);
}

void run_pool(size_t n_tasks, int jobs, const std::function<void(size_t)>& work) {
  const int n_threads = std::min<int>(thread_count(jobs), static_cast<int>(n_tasks));
  if (n_threads <= 1) {
    for (size_t i = 0; i < n_tasks; ++i) work(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (size_t i = next++; i < n_tasks; i = next++) work(i);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct CommonOpts {
  std::string config_path;
  bool paper_literal = false;
  int jobs = 0;
};

FeatureConfig resolve_config(const CommonOpts& opts) {
  FeatureConfig cfg =
      opts.config_path.empty() ? FeatureConfig{} : load_config(opts.config_path);
  if (opts.paper_literal) {
    cfg.mask.spread_convention = SpreadConvention::paper_literal;
    cfg.pnc.mu_t = 2.0;
  }
  return cfg;
}

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// --- metrics helpers -------------------------------------------------------

// One utterance per line, first token is the utterance id.
std::map<std::string, Transcript> read_transcripts(const std::string& path, bool strip_punct) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::map<std::string, Transcript> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id)) continue;
    std::string rest;
    std::getline(ls, rest);
    out[id] = tokenize(rest, strip_punct);
  }
  if (out.empty()) throw std::runtime_error(path + ": no utterances");
  return out;
}

std::map<std::string, double> read_quality_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad quality score in line '" + line + "'");
    }
  }
  return out;
}

double corpus_wer(const std::map<std::string, Transcript>& ref,
                  const std::map<std::string, Transcript>& hyp) {
  long edits = 0, words = 0;
  for (const auto& [id, r] : ref) {
    if (r.words.empty()) throw std::invalid_argument("empty reference for utterance " + id);
    const auto it = hyp.find(id);
    const Transcript empty;
    edits += edit_counts(r, it != hyp.end() ? it->second : empty).total();
    words += static_cast<long>(r.words.size());
  }
  return static_cast<double>(edits) / static_cast<double>(words);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biologically inspired acoustic feature extraction toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON configuration file");
  app.add_flag("--paper-literal", common.paper_literal,
               "Use the literal published spread-function sign and mu_t = 2");

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Extract one feature kind from WAV input");
  std::string kind_name = "logmelspec", out_path, format_name = "afm1";
  std::vector<std::string> inputs;
  extract_cmd->add_option("--kind", kind_name, "Feature kind")->capture_default_str();
  extract_cmd->add_option("inputs", inputs, "WAV files or directories")->required();
  extract_cmd->add_option("-o,--output", out_path, "Output file or directory")->required();
  extract_cmd->add_option("--format", format_name, "csv or afm1")->capture_default_str();
  extract_cmd->add_option("-j,--jobs", common.jobs, "Worker threads");

  // extract-all
  auto* all_cmd = app.add_subcommand("extract-all", "Extract all nine feature kinds");
  all_cmd->add_option("inputs", inputs, "WAV files or directories")->required();
  all_cmd->add_option("-o,--output", out_path, "Output directory")->required();
  all_cmd->add_option("--format", format_name, "csv or afm1")->capture_default_str();
  all_cmd->add_option("-j,--jobs", common.jobs, "Worker threads");

  // filterbank
  auto* fb_cmd = app.add_subcommand("filterbank", "Dump a filterbank as CSV");
  std::string fb_kind = "mel";
  int fb_filters = 80, fb_bins = 201, fb_rate = 16000;
  double fb_fmin = 20.0, fb_fmax = 0.0, fb_alpha = 2.0;
  fb_cmd->add_option("--type", fb_kind, "mel | gammatone | gammatone-sq | dog")
      ->capture_default_str();
  fb_cmd->add_option("--n-filters", fb_filters)->capture_default_str();
  fb_cmd->add_option("--n-bins", fb_bins)->capture_default_str();
  fb_cmd->add_option("--sample-rate", fb_rate)->capture_default_str();
  fb_cmd->add_option("--f-min", fb_fmin)->capture_default_str();
  fb_cmd->add_option("--f-max", fb_fmax, "0 means Nyquist")->capture_default_str();
  fb_cmd->add_option("--alpha", fb_alpha, "DoG surround bandwidth scale")->capture_default_str();
  fb_cmd->add_option("-o,--output", out_path, "Output CSV")->required();

  // mask-threshold
  auto* mask_cmd = app.add_subcommand("mask-threshold",
                                      "Per-frame global masking thresholds as CSV");
  mask_cmd->add_option("inputs", inputs, "One WAV file")->required();
  mask_cmd->add_option("-o,--output", out_path, "Output CSV")->required();

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "Feature-space noise-robustness probe");
  std::string kinds_arg = "logmelspec", snrs_arg = "30,20,10";
  std::uint64_t seed = 0;
  probe_cmd->add_option("--kinds", kinds_arg, "Comma-separated feature kinds")
      ->capture_default_str();
  probe_cmd->add_option("--snrs", snrs_arg, "Comma-separated target SNRs in dB")
      ->capture_default_str();
  probe_cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
  probe_cmd->add_option("inputs", inputs, "One WAV file")->required();
  probe_cmd->add_option("-o,--output", out_path, "Output CSV (default stdout)");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "WER / WERD / NWERD from transcripts");
  std::string ref_path, hyp_path, hyp_noisy_path, quality_path;
  bool strip_punct = false;
  metrics_cmd->add_option("--ref", ref_path, "Reference transcripts")->required();
  metrics_cmd->add_option("--hyp", hyp_path, "Hypothesis transcripts (clean)")->required();
  metrics_cmd->add_option("--hyp-noisy", hyp_noisy_path, "Hypothesis transcripts (noisy)");
  metrics_cmd->add_option("--quality", quality_path, "Quality scores CSV (utterance,score)");
  metrics_cmd->add_flag("--strip-punct", strip_punct, "Strip punctuation before scoring");

  // config
  auto* config_cmd = app.add_subcommand("config", "Print the fully resolved configuration");
  bool dump = false;
  config_cmd->add_flag("--dump", dump, "Accepted for compatibility; always dumps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const FeatureConfig base_cfg = resolve_config(common);
    const FeatureFileFormat format = parse_format(format_name);
    const std::string ext = format == FeatureFileFormat::csv ? ".csv" : ".afm1";

    if (extract_cmd->parsed()) {
      const auto kind = feature_kind_from_string(kind_name);
      if (!kind) throw std::invalid_argument("unknown feature kind '" + kind_name + "'");
      FeatureConfig cfg = base_cfg;
      cfg.kind = *kind;
      const auto files = collect_inputs(inputs);
      const bool multi = files.size() > 1;
      if (multi) fs::create_directories(out_path);
      run_pool(files.size(), common.jobs, [&](size_t i) {
        const AudioBuffer audio = read_wav(files[i].string());
        const FeatureMatrix m = extract(audio, cfg);
        atomic_write_feature(m, output_path(out_path, files[i], multi, ext), format);
      });
    } else if (all_cmd->parsed()) {
      const auto files = collect_inputs(inputs);
      fs::create_directories(out_path);
      run_pool(files.size(), common.jobs, [&](size_t i) {
        const AudioBuffer audio = read_wav(files[i].string());
        for (const auto& [kind, m] : extract_all(audio, base_cfg)) {
          const std::string suffix = std::string(".") + to_string(kind) + ext;
          atomic_write_feature(m, output_path(out_path, files[i], true, suffix), format);
        }
      });
    } else if (fb_cmd->parsed()) {
      const double fmax = fb_fmax > 0.0 ? fb_fmax : fb_rate / 2.0;
      FilterBank fb;
      if (fb_kind == "mel")
        fb = mel_filterbank(fb_filters, fb_bins, fb_rate, fb_fmin, fmax);
      else if (fb_kind == "gammatone")
        fb = gammatone_filterbank(fb_filters, fb_bins, fb_rate, fb_fmin, fmax, false);
      else if (fb_kind == "gammatone-sq")
        fb = gammatone_filterbank(fb_filters, fb_bins, fb_rate, fb_fmin, fmax, true);
      else if (fb_kind == "dog")
        fb = dog_filterbank(fb_filters, fb_bins, fb_rate, fb_fmin, fmax, fb_alpha);
      else
        throw std::invalid_argument("unknown filterbank type '" + fb_kind + "'");
      std::ostringstream csv;
      for (Index i = 0; i < fb.n_filters(); ++i) {
        csv << csv_double(fb.center_freqs[i]);
        for (Index j = 0; j < fb.n_bins(); ++j) csv << ',' << csv_double(fb.weights(i, j));
        csv << '\n';
      }
      atomic_write(out_path, csv.str());
    } else if (mask_cmd->parsed()) {
      const auto files = collect_inputs(inputs);
      if (files.size() != 1)
        throw std::invalid_argument("mask-threshold expects exactly one input WAV");
      const AudioBuffer audio = read_wav(files[0].string());
      if (audio.sample_rate != base_cfg.sample_rate)
        throw std::invalid_argument("input sample rate does not match config");
      const Spectrogram mag = stft(audio, base_cfg.stft);
      const Spectrogram smoothed =
          smooth_psd(normalize_psd(psd_db(mag, base_cfg.stft.win_length)));
      const MaskingThresholds thr = masking_thresholds(smoothed, base_cfg.mask);
      std::ostringstream csv;
      for (Index f = 0; f < thr.theta.rows(); ++f) {
        for (Index j = 0; j < thr.theta.cols(); ++j) {
          if (j) csv << ',';
          csv << csv_double(thr.theta(f, j));
        }
        csv << '\n';
      }
      atomic_write(out_path, csv.str());
    } else if (probe_cmd->parsed()) {
      const auto files = collect_inputs(inputs);
      if (files.size() != 1) throw std::invalid_argument("probe expects exactly one input WAV");
      std::vector<FeatureKind> kinds;
      std::istringstream ks(kinds_arg);
      for (std::string tok; std::getline(ks, tok, ',');) {
        const auto k = feature_kind_from_string(tok);
        if (!k) throw std::invalid_argument("unknown feature kind '" + tok + "'");
        kinds.push_back(*k);
      }
      std::vector<double> snrs;
      std::istringstream ss(snrs_arg);
      for (std::string tok; std::getline(ss, tok, ',');) snrs.push_back(std::stod(tok));
      if (kinds.empty() || snrs.empty())
        throw std::invalid_argument("probe needs at least one kind and one SNR");

      const AudioBuffer audio = read_wav(files[0].string());
      std::ostringstream csv;
      csv << "feature,target_snr_db,achieved_snr_db,relative_distortion,changed_cell_fraction\n";
      for (const FeatureKind k : kinds) {
        FeatureConfig cfg = base_cfg;
        cfg.kind = k;
        for (const ProbeReport& r : probe_feature(audio, cfg, snrs, seed))
          csv << to_string(r.feature_kind) << ',' << csv_double(r.target_snr_db) << ','
              << csv_double(r.achieved_snr_db) << ',' << csv_double(r.relative_distortion)
              << ',' << csv_double(r.changed_cell_fraction) << '\n';
      }
      if (out_path.empty())
        std::cout << csv.str();
      else
        atomic_write(out_path, csv.str());
    } else if (metrics_cmd->parsed()) {
      const auto ref = read_transcripts(ref_path, strip_punct);
      const auto hyp = read_transcripts(hyp_path, strip_punct);
      const double wer_clean = corpus_wer(ref, hyp);
      std::printf("WER %.4f\n", wer_clean);
      if (!hyp_noisy_path.empty()) {
        const auto hyp_noisy = read_transcripts(hyp_noisy_path, strip_punct);
        const double wer_noisy = corpus_wer(ref, hyp_noisy);
        std::printf("WER_NOISY %.4f\n", wer_noisy);
        std::printf("WERD %.4f\n", werd(wer_clean, wer_noisy));
        if (!quality_path.empty()) {
          const auto quality = read_quality_csv(quality_path);
          // NWERD is the mean of per-utterance WERD over quality score.
          double acc = 0.0;
          long count = 0;
          for (const auto& [id, r] : ref) {
            const auto q = quality.find(id);
            if (q == quality.end()) continue;
            const Transcript empty;
            const auto hc = hyp.find(id);
            const auto hn = hyp_noisy.find(id);
            const double wc = wer(r, hc != hyp.end() ? hc->second : empty);
            const double wn = wer(r, hn != hyp_noisy.end() ? hn->second : empty);
            acc += nwerd(werd(wc, wn), q->second);
            ++count;
          }
          if (count == 0)
            throw std::invalid_argument("quality CSV matched no reference utterances");
          std::printf("NWERD %.4f\n", acc / count);
        }
      }
    } else if (config_cmd->parsed()) {
      std::cout << config_to_json(base_cfg) << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "aurafeat: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aurafeat: %s\n", e.what());
    return 2;
  }
  return 0;
}
