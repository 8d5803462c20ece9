#include "aurafeat/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace aurafeat;

namespace {

Transcript words(std::initializer_list<const char*> ws) {
  Transcript t;
  for (const char* w : ws) t.words.emplace_back(w);
  return t;
}

// Exhaustive minimum-edit-distance oracle over all single-edit scripts,
// memoized recursion independent of the production DP layout.
int brute_edit_distance(const std::vector<std::string>& r, const std::vector<std::string>& h,
                        size_t i, size_t j) {
  if (i == r.size()) return static_cast<int>(h.size() - j);
  if (j == h.size()) return static_cast<int>(r.size() - i);
  int best = brute_edit_distance(r, h, i + 1, j + 1) + (r[i] == h[j] ? 0 : 1);
  best = std::min(best, brute_edit_distance(r, h, i + 1, j) + 1);
  best = std::min(best, brute_edit_distance(r, h, i, j + 1) + 1);
  return best;
}

AudioBuffer tone(double freq, double amp, int n) {
  Vector s(n);
  for (int i = 0; i < n; ++i)
    s[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / 16000.0);
  return AudioBuffer(std::move(s), 16000);
}

}  // namespace

TEST_CASE("tokenize") {
  const Transcript t = tokenize("  Hello WORLD  foo ");
  REQUIRE(t.words.size() == 3);
  CHECK(t.words[0] == "hello");
  CHECK(t.words[1] == "world");

  CHECK(tokenize("don't stop!", true).words[0] == "dont");
  CHECK(tokenize("don't stop!", false).words[0] == "don't");
  CHECK(tokenize("   ").words.empty());
}

TEST_CASE("wer basics") {
  CHECK(wer(words({"a", "b", "c"}), words({"a", "b", "c"})) == doctest::Approx(0.0));
  CHECK(wer(words({"a", "b", "c"}), words({"a", "x", "c"})) == doctest::Approx(1.0 / 3.0));
  CHECK(wer(words({"a", "b", "c"}), words({})) == doctest::Approx(1.0));
  CHECK(wer(words({"a"}), words({"a", "b", "c"})) == doctest::Approx(2.0));  // may exceed 1
  CHECK_THROWS_AS(static_cast<void>(wer(words({}), words({"a"}))), std::invalid_argument);
}

TEST_CASE("edit counts decompose into S, I, D") {
  const EditCounts c = edit_counts(words({"the", "cat", "sat"}), words({"a", "cat"}));
  CHECK(c.total() == 2);
  CHECK(c.substitutions == 1);
  CHECK(c.deletions == 1);
  CHECK(c.insertions == 0);
}

TEST_CASE("wer matches the exhaustive oracle on short sequences") {
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::string>> all;
  all.push_back({});
  for (size_t len = 1; len <= 4; ++len) {
    const size_t start = all.size();
    std::vector<std::vector<std::string>> next;
    for (const auto& seq : all)
      if (seq.size() == len - 1)
        for (const auto& s : alphabet) {
          auto e = seq;
          e.push_back(s);
          next.push_back(std::move(e));
        }
    (void)start;
    all.insert(all.end(), next.begin(), next.end());
  }
  int checked = 0;
  for (const auto& r : all) {
    if (r.empty()) continue;
    for (const auto& h : all) {
      const int want = brute_edit_distance(r, h, 0, 0);
      const int got = edit_counts(Transcript{r}, Transcript{h}).total();
      CHECK(got == want);
      ++checked;
    }
  }
  CHECK(checked == 120 * 121);  // 120 nonempty refs x 121 hyps
}

TEST_CASE("werd and nwerd") {
  CHECK(werd(0.05, 0.25) == doctest::Approx(0.20));
  CHECK(werd(0.1, 0.1) == doctest::Approx(0.0));
  CHECK(nwerd(0.0, 3.0) == doctest::Approx(0.0));
  CHECK(nwerd(0.20, 2.0) == doctest::Approx(0.10));
  CHECK(nwerd(0.20, 4.0) < nwerd(0.20, 2.0));  // less distorted is penalized more
  CHECK_THROWS_AS(static_cast<void>(nwerd(0.2, 0.0)), std::invalid_argument);
}

TEST_CASE("snr_db") {
  const AudioBuffer s = tone(440.0, 0.5, 1600);
  CHECK(snr_db(s, s) == doctest::Approx(0.0));
  CHECK(snr_db(s, AudioBuffer(0.1 * s.samples, 16000)) == doctest::Approx(20.0));
  CHECK(snr_db(s, AudioBuffer(10.0 * s.samples, 16000)) == doctest::Approx(-20.0));
  CHECK_THROWS_AS(static_cast<void>(snr_db(s, AudioBuffer(Vector::Zero(1600), 16000))),
                  std::invalid_argument);
}

TEST_CASE("white_noise is deterministic and roughly standard normal") {
  const Vector a = white_noise(4096, 42);
  const Vector b = white_noise(4096, 42);
  CHECK(a == b);
  CHECK(white_noise(4096, 43) != a);
  CHECK(std::abs(a.mean()) < 0.1);
  CHECK(std::abs(a.squaredNorm() / 4096.0 - 1.0) < 0.1);
}

TEST_CASE("add_noise_at_snr hits the target exactly") {
  const AudioBuffer clean = tone(523.0, 0.4, 3200);
  const AudioBuffer noise(white_noise(1000, 7), 16000);  // shorter: gets tiled
  for (double target : {-40.0, -10.0, 0.0, 20.0, 60.0, 100.0}) {
    const AudioBuffer noisy = add_noise_at_snr(clean, noise, target);
    AudioBuffer delta(noisy.samples - clean.samples, 16000);
    CHECK(snr_db(clean, delta) == doctest::Approx(target).epsilon(1e-9));
  }
  CHECK_THROWS_AS(
      static_cast<void>(add_noise_at_snr(clean, noise, 1e6)), std::invalid_argument);
  CHECK_THROWS_AS(
      static_cast<void>(add_noise_at_snr(AudioBuffer(Vector::Zero(100), 16000), noise, 0.0)),
      std::invalid_argument);
}

TEST_CASE("probe_feature") {
  const AudioBuffer clean = tone(440.0, 0.4, 4000);
  FeatureConfig cfg;
  cfg.kind = FeatureKind::LogMelSpec;

  SUBCASE("near-clean injection barely moves the features") {
    const auto reports = probe_feature(clean, cfg, {1000.0}, 1);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].relative_distortion < 1e-3);
  }
  SUBCASE("distortion is nonincreasing in SNR; report length matches") {
    const std::vector<double> snrs = {40.0, 30.0, 20.0, 10.0, 0.0};
    const auto reports = probe_feature(clean, cfg, snrs, 3);
    REQUIRE(reports.size() == snrs.size());
    for (size_t i = 1; i < reports.size(); ++i)
      CHECK(reports[i].relative_distortion >= reports[i - 1].relative_distortion);
    for (const auto& r : reports) {
      CHECK(r.achieved_snr_db == doctest::Approx(r.target_snr_db).epsilon(1e-9));
      CHECK(r.changed_cell_fraction >= 0.0);
      CHECK(r.changed_cell_fraction <= 1.0);
    }
  }
  SUBCASE("same seed reproduces bitwise") {
    const auto a = probe_feature(clean, cfg, {10.0}, 99);
    const auto b = probe_feature(clean, cfg, {10.0}, 99);
    CHECK(a[0].relative_distortion == b[0].relative_distortion);
    CHECK(a[0].changed_cell_fraction == b[0].changed_cell_fraction);
  }
}
