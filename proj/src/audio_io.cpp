#include "aurafeat/audio_io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace aurafeat {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, size_t offset, const std::string& what) {
  std::ostringstream msg;
  msg << path << ": " << what << " (byte offset " << offset << ")";
  throw std::runtime_error(msg.str());
}

std::uint32_t read_u32(const std::string& buf, size_t off) {
  std::uint32_t v;
  std::memcpy(&v, buf.data() + off, 4);
  return v;  // little-endian host assumed
}

std::uint16_t read_u16(const std::string& buf, size_t off) {
  std::uint16_t v;
  std::memcpy(&v, buf.data() + off, 2);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  const std::string buf = slurp(path);
  if (buf.size() < 12 || buf.compare(0, 4, "RIFF") != 0)
    parse_fail(path, 0, "not a RIFF file");
  if (buf.compare(8, 4, "WAVE") != 0) parse_fail(path, 8, "not a WAVE file");

  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;

  size_t off = 12;
  while (off + 8 <= buf.size()) {
    const std::string id = buf.substr(off, 4);
    const std::uint32_t len = read_u32(buf, off + 4);
    if (off + 8 + len > buf.size())
      parse_fail(path, off, "chunk '" + id + "' exceeds file size");
    if (id == "fmt ") {
      if (len < 16) parse_fail(path, off, "fmt chunk too short");
      format_tag = read_u16(buf, off + 8);
      channels = read_u16(buf, off + 10);
      sample_rate = read_u32(buf, off + 12);
      bits = read_u16(buf, off + 22);
      have_fmt = true;
    } else if (id == "data") {
      data_off = off + 8;
      data_len = len;
    }
    off += 8 + len + (len & 1);  // chunks are word aligned
  }
  if (!have_fmt) parse_fail(path, 12, "missing fmt chunk");
  if (data_len == 0) parse_fail(path, 12, "missing or empty data chunk");
  if (channels == 0) parse_fail(path, 12, "zero channels");

  const bool pcm = format_tag == 1;
  const bool ieee = format_tag == 3;
  if (!((pcm && (bits == 16 || bits == 24)) || (ieee && bits == 32)))
    throw std::runtime_error(path + ": unsupported format (tag=" + std::to_string(format_tag) +
                             ", bits=" + std::to_string(bits) + ")");

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t n_frames = data_len / frame_bytes;
  if (n_frames == 0) parse_fail(path, data_off, "data chunk holds no full frame");

  Vector samples(static_cast<Index>(n_frames));
  for (size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const size_t p = data_off + f * frame_bytes + c * bytes_per_sample;
      double v = 0.0;
      if (pcm && bits == 16) {
        std::int16_t s;
        std::memcpy(&s, buf.data() + p, 2);
        v = s / 32768.0;
      } else if (pcm && bits == 24) {
        const auto b0 = static_cast<unsigned char>(buf[p]);
        const auto b1 = static_cast<unsigned char>(buf[p + 1]);
        const auto b2 = static_cast<unsigned char>(buf[p + 2]);
        std::int32_t s = (b2 << 16) | (b1 << 8) | b0;
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        float s;
        std::memcpy(&s, buf.data() + p, 4);
        v = s;
      }
      acc += v;
    }
    samples[static_cast<Index>(f)] = acc / channels;
  }
  return AudioBuffer(std::move(samples), static_cast<int>(sample_rate));
}

void write_wav(const AudioBuffer& audio, const std::string& path) {
  const std::uint32_t n = static_cast<std::uint32_t>(audio.length());
  const std::uint32_t data_len = n * 2;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");

  auto u32 = [&out](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&out](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };

  out.write("RIFF", 4);
  u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);  // PCM
  u16(1);  // mono
  u32(static_cast<std::uint32_t>(audio.sample_rate));
  u32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
  u16(2);
  u16(16);
  out.write("data", 4);
  u32(data_len);
  for (Index i = 0; i < audio.length(); ++i) {
    double v = std::clamp(audio.samples[i], -1.0, 1.0);
    auto s = static_cast<std::int16_t>(std::clamp(std::lround(v * 32768.0), -32768l, 32767l));
    out.write(reinterpret_cast<const char*>(&s), 2);
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

constexpr char kAfm1Magic[8] = {'A', 'F', 'M', '1', 'B', 'I', 'N', '1'};

}  // namespace

void write_feature_matrix(const FeatureMatrix& matrix, const std::string& path,
                          FeatureFileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const auto frames = static_cast<std::uint32_t>(matrix.data.rows());
  const auto dims = static_cast<std::uint32_t>(matrix.data.cols());

  if (format == FeatureFileFormat::csv) {
    out << to_string(matrix.kind) << ',' << frames << ',' << dims << ','
        << matrix.fingerprint << '\n';
    out.precision(9);
    for (std::uint32_t f = 0; f < frames; ++f) {
      for (std::uint32_t d = 0; d < dims; ++d) {
        if (d) out << ',';
        out << matrix.data(f, d);
      }
      out << '\n';
    }
  } else {
    out.write(kAfm1Magic, 8);
    const auto kind_id = static_cast<std::uint32_t>(matrix.kind);
    out.write(reinterpret_cast<const char*>(&frames), 4);
    out.write(reinterpret_cast<const char*>(&dims), 4);
    out.write(reinterpret_cast<const char*>(&kind_id), 4);
    for (std::uint32_t f = 0; f < frames; ++f)
      for (std::uint32_t d = 0; d < dims; ++d) {
        const auto v = static_cast<float>(matrix.data(f, d));
        out.write(reinterpret_cast<const char*>(&v), 4);
      }
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

FeatureMatrix read_feature_matrix(const std::string& path, FeatureFileFormat format) {
  FeatureMatrix m;
  if (format == FeatureFileFormat::csv) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
    std::istringstream hs(header);
    std::string kind_name, frames_s, dims_s;
    std::getline(hs, kind_name, ',');
    std::getline(hs, frames_s, ',');
    std::getline(hs, dims_s, ',');
    std::getline(hs, m.fingerprint, ',');
    const auto kind = feature_kind_from_string(kind_name);
    if (!kind) throw std::runtime_error(path + ": unknown feature kind '" + kind_name + "'");
    m.kind = *kind;
    const Index frames = std::stol(frames_s);
    const Index dims = std::stol(dims_s);
    m.data.resize(frames, dims);
    for (Index f = 0; f < frames; ++f) {
      std::string line;
      if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated CSV");
      std::istringstream ls(line);
      std::string cell;
      for (Index d = 0; d < dims; ++d) {
        if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ": short CSV row");
        m.data(f, d) = std::stod(cell);
      }
    }
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kAfm1Magic, 8) != 0)
      throw std::runtime_error(path + ": not an AFM1 file");
    std::uint32_t frames, dims, kind_id;
    in.read(reinterpret_cast<char*>(&frames), 4);
    in.read(reinterpret_cast<char*>(&dims), 4);
    in.read(reinterpret_cast<char*>(&kind_id), 4);
    if (!in || kind_id >= kFeatureKindCount)
      throw std::runtime_error(path + ": corrupt AFM1 header");
    m.kind = static_cast<FeatureKind>(kind_id);
    m.data.resize(frames, dims);
    for (std::uint32_t f = 0; f < frames; ++f)
      for (std::uint32_t d = 0; d < dims; ++d) {
        float v;
        in.read(reinterpret_cast<char*>(&v), 4);
        m.data(f, d) = v;
      }
    if (!in) throw std::runtime_error(path + ": truncated AFM1 payload");
  }
  return m;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) { ok = true; break; }
    if (!ok) throw std::runtime_error("config: unknown key '" + path + key + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error("config: type mismatch at '" + path + key + "'");
  }
}

}  // namespace

FeatureConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config: top-level JSON object required");

  FeatureConfig cfg;
  // fingerprint/notices appear in echoed configs and are ignored on input
  reject_unknown(doc, {"kind", "sample_rate", "stft", "n_filters", "n_ceps", "f_min",
                       "f_max", "dog_alpha", "pre_emph", "log_floor", "mask", "pnc",
                       "fingerprint", "notices"},
                 "");

  if (doc.contains("kind")) {
    std::string name = doc.at("kind").get<std::string>();
    const auto k = feature_kind_from_string(name);
    if (!k) throw std::runtime_error("config: unknown feature kind '" + name + "' at 'kind'");
    cfg.kind = *k;
  }
  read_field(doc, "sample_rate", cfg.sample_rate, "");
  read_field(doc, "n_filters", cfg.n_filters, "");
  cfg.n_ceps = cfg.n_filters;  // default tracks n_filters unless set explicitly
  read_field(doc, "n_ceps", cfg.n_ceps, "");
  read_field(doc, "f_min", cfg.f_min, "");
  read_field(doc, "f_max", cfg.f_max, "");
  read_field(doc, "dog_alpha", cfg.dog_alpha, "");
  read_field(doc, "pre_emph", cfg.pre_emph, "");
  read_field(doc, "log_floor", cfg.log_floor, "");

  if (doc.contains("stft")) {
    const json& s = doc.at("stft");
    reject_unknown(s, {"win_length", "hop_length", "n_fft", "window"}, "stft.");
    read_field(s, "win_length", cfg.stft.win_length, "stft.");
    read_field(s, "hop_length", cfg.stft.hop_length, "stft.");
    read_field(s, "n_fft", cfg.stft.n_fft, "stft.");
    if (s.contains("window")) {
      const std::string w = s.at("window").get<std::string>();
      if (w == "hann") cfg.stft.window = WindowKind::hann;
      else if (w == "hamming") cfg.stft.window = WindowKind::hamming;
      else throw std::runtime_error("config: unknown window '" + w + "' at 'stft.window'");
    }
  }
  if (doc.contains("mask")) {
    const json& m = doc.at("mask");
    reject_unknown(m, {"spread_convention"}, "mask.");
    if (m.contains("spread_convention")) {
      const std::string s = m.at("spread_convention").get<std::string>();
      if (s == "standard") cfg.mask.spread_convention = SpreadConvention::standard;
      else if (s == "paper_literal") cfg.mask.spread_convention = SpreadConvention::paper_literal;
      else throw std::runtime_error("config: unknown spread convention '" + s +
                                    "' at 'mask.spread_convention'");
    }
  }
  if (doc.contains("pnc")) {
    const json& p = doc.at("pnc");
    reject_unknown(p, {"m_window", "lambda_t", "mu_t", "lambda_a", "lambda_b",
                       "smooth_neighbors", "power_exponent"},
                   "pnc.");
    read_field(p, "m_window", cfg.pnc.m_window, "pnc.");
    read_field(p, "lambda_t", cfg.pnc.lambda_t, "pnc.");
    read_field(p, "mu_t", cfg.pnc.mu_t, "pnc.");
    read_field(p, "lambda_a", cfg.pnc.lambda_a, "pnc.");
    read_field(p, "lambda_b", cfg.pnc.lambda_b, "pnc.");
    read_field(p, "smooth_neighbors", cfg.pnc.smooth_neighbors, "pnc.");
    read_field(p, "power_exponent", cfg.pnc.power_exponent, "pnc.");
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  return cfg;
}

FeatureConfig load_config(const std::string& path) { return parse_config(slurp(path)); }

std::string config_to_json(const FeatureConfig& cfg) {
  json doc;
  doc["kind"] = to_string(cfg.kind);
  doc["sample_rate"] = cfg.sample_rate;
  doc["stft"] = {{"win_length", cfg.stft.win_length},
                 {"hop_length", cfg.stft.hop_length},
                 {"n_fft", cfg.stft.n_fft},
                 {"window", cfg.stft.window == WindowKind::hann ? "hann" : "hamming"}};
  doc["n_filters"] = cfg.n_filters;
  doc["n_ceps"] = cfg.n_ceps;
  doc["f_min"] = cfg.f_min;
  doc["f_max"] = cfg.effective_f_max();
  doc["dog_alpha"] = cfg.dog_alpha;
  doc["pre_emph"] = cfg.pre_emph;
  doc["log_floor"] = cfg.log_floor;
  doc["mask"] = {{"spread_convention",
                  cfg.mask.spread_convention == SpreadConvention::standard ? "standard"
                                                                           : "paper_literal"}};
  doc["pnc"] = {{"m_window", cfg.pnc.m_window},
                {"lambda_t", cfg.pnc.lambda_t},
                {"mu_t", cfg.pnc.mu_t},
                {"lambda_a", cfg.pnc.lambda_a},
                {"lambda_b", cfg.pnc.lambda_b},
                {"smooth_neighbors", cfg.pnc.smooth_neighbors},
                {"power_exponent", cfg.pnc.power_exponent}};
  doc["fingerprint"] = config_fingerprint(cfg);

  json notices = json::array();
  if (cfg.pnc.mu_t >= 1.0) notices.push_back("paper-literal mu_t in effect");
  if (cfg.mask.spread_convention == SpreadConvention::paper_literal)
    notices.push_back("paper-literal spread-function sign convention in effect");
  if (!notices.empty()) doc["notices"] = notices;
  return doc.dump(2);
}

}  // namespace aurafeat
