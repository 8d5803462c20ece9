#include "aurafeat/pnc.hpp"

#include "aurafeat/dsp.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace aurafeat;

namespace {

ChannelPowerMatrix cpm(const Matrix& m, PncStage stage) { return {m, stage}; }

AudioBuffer tone(double freq, double amp, int n) {
  Vector s(n);
  for (int i = 0; i < n; ++i)
    s[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / 16000.0);
  return AudioBuffer(std::move(s), 16000);
}

}  // namespace

TEST_CASE("short_time_power") {
  const FilterBank fb = gammatone_filterbank(8, 201, 16000, 20.0, 8000.0, true);
  StftConfig cfg;

  SUBCASE("silence maps to zero") {
    const auto p = short_time_power(AudioBuffer(Vector::Zero(800), 16000), cfg, fb);
    CHECK(p.data.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("matches the power_spectrum + apply_filterbank composition") {
    const AudioBuffer a = tone(700.0, 0.4, 1200);
    const auto p = short_time_power(a, cfg, fb);
    const Spectrogram oracle = apply_filterbank(power_spectrum(stft(a, cfg)), fb);
    CHECK((p.data - oracle.data).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("requires the squared-normalized bank") {
    const FilterBank plain = gammatone_filterbank(8, 201, 16000, 20.0, 8000.0, false);
    CHECK_THROWS_AS(static_cast<void>(short_time_power(tone(700.0, 0.4, 800), cfg, plain)),
                    std::invalid_argument);
  }
}

TEST_CASE("flat power frame passes through unit-row-sum channels") {
  const FilterBank fb = gammatone_filterbank(8, 201, 16000, 20.0, 8000.0, true);
  Spectrogram flat;
  flat.data = Matrix::Constant(3, 201, 0.7);
  flat.bin_freqs = Vector::LinSpaced(201, 0.0, 8000.0);
  flat.domain = SpectrogramDomain::power;
  const Spectrogram out = apply_filterbank(flat, fb);
  CHECK(((out.data.array() - 0.7).abs() < 1e-9).all());
}

TEST_CASE("medium_time_power") {
  SUBCASE("M = 0 is the identity") {
    Matrix m = Matrix::Random(6, 3).cwiseAbs();
    CHECK(medium_time_power(cpm(m, PncStage::P), 0).data.isApprox(m, 1e-15));
  }
  SUBCASE("constant input including boundaries") {
    const Matrix m = Matrix::Constant(7, 2, 3.5);
    CHECK(((medium_time_power(cpm(m, PncStage::P), 2).data.array() - 3.5).abs() < 1e-12).all());
  }
  SUBCASE("ramp interior value is the arithmetic mean") {
    Matrix m(5, 1);
    m << 0, 1, 2, 3, 4;
    const auto q = medium_time_power(cpm(m, PncStage::P), 2);
    CHECK(q.data(2, 0) == doctest::Approx(2.0));
    CHECK(q.data(0, 0) == doctest::Approx(1.0));   // frames 0..2
    CHECK(q.data(4, 0) == doctest::Approx(3.0));   // frames 2..4
  }
}

TEST_CASE("asymmetric_noise_suppression") {
  PncConfig cfg;

  SUBCASE("constant input decays to zero excess") {
    const Matrix q = Matrix::Constant(10000, 2, 1.3);
    const auto q0 = asymmetric_noise_suppression(cpm(q, PncStage::Q), cfg);
    CHECK((q0.data.array() >= 0.0).all());
    CHECK(q0.data.bottomRows(100).maxCoeff() < 1e-3 * 1.3);
  }
  SUBCASE("impulse yields positive excess at the impulse") {
    Matrix q = Matrix::Constant(50, 1, 0.01);
    q(25, 0) = 5.0;
    const auto q0 = asymmetric_noise_suppression(cpm(q, PncStage::Q), cfg);
    CHECK(q0.data(25, 0) > 1.0);
  }
  SUBCASE("zero input stays zero") {
    const auto q0 = asymmetric_noise_suppression(cpm(Matrix::Zero(20, 3), PncStage::Q), cfg);
    CHECK(q0.data.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("temporal_masking") {
  PncConfig cfg;  // lambda_t = 0.85, mu_t = 0.2

  SUBCASE("constant input passes the gate") {
    const Matrix q0 = Matrix::Constant(12, 3, 0.6);
    CHECK(temporal_masking(cpm(q0, PncStage::Q_0), cfg).data.isApprox(q0, 1e-15));
  }
  SUBCASE("hand-unrolled masked tail after an impulse") {
    Matrix q0 = Matrix::Zero(6, 1);
    q0(0, 0) = 1.0;
    const auto r = temporal_masking(cpm(q0, PncStage::Q_0), cfg);
    CHECK(r.data(0, 0) == doctest::Approx(1.0));
    CHECK(r.data(1, 0) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(r.data(2, 0) == doctest::Approx(0.17).epsilon(1e-9));
    CHECK(r.data(3, 0) == doctest::Approx(0.1445).epsilon(1e-9));
    CHECK(r.data(4, 0) == doctest::Approx(0.2 * std::pow(0.85, 3)).epsilon(1e-9));
  }
  SUBCASE("monotone nondecreasing input is untouched") {
    Matrix q0(5, 1);
    q0 << 0.1, 0.2, 0.3, 0.4, 0.5;
    CHECK(temporal_masking(cpm(q0, PncStage::Q_0), cfg).data.isApprox(q0, 1e-15));
  }
  SUBCASE("envelope bound R <= max(Q_0, mu_t * peak)") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    Matrix q0(100, 4);
    for (Index i = 0; i < q0.size(); ++i) q0(i) = dist(rng);
    const auto r = temporal_masking(cpm(q0, PncStage::Q_0), cfg);
    // replay the recurrence to recover the running peak
    for (Index l = 0; l < 4; ++l) {
      double peak = 0.0;
      for (Index m = 0; m < 100; ++m) {
        CHECK(r.data(m, l) <= std::max(q0(m, l), cfg.mu_t * peak) + 1e-12);
        peak = std::max(cfg.lambda_t * peak, q0(m, l));
      }
    }
  }
}

TEST_CASE("weight_smoothing") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  Matrix p(6, 5), q(6, 5), r(6, 5);
  for (Index i = 0; i < p.size(); ++i) { p(i) = dist(rng); q(i) = dist(rng); r(i) = dist(rng); }

  SUBCASE("R = Q gives the identity transfer") {
    const auto t = weight_smoothing(cpm(q, PncStage::R), cpm(q, PncStage::Q),
                                    cpm(p, PncStage::P), 4);
    CHECK(t.data.isApprox(p, 1e-12));
  }
  SUBCASE("R = 0 zeroes the output") {
    const auto t = weight_smoothing(cpm(Matrix::Zero(6, 5), PncStage::R),
                                    cpm(q, PncStage::Q), cpm(p, PncStage::P), 4);
    CHECK(t.data.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("N = 0 matches the elementwise scalar oracle") {
    const auto t = weight_smoothing(cpm(r, PncStage::R), cpm(q, PncStage::Q),
                                    cpm(p, PncStage::P), 0);
    for (Index m = 0; m < 6; ++m)
      for (Index l = 0; l < 5; ++l)
        CHECK(t.data(m, l) == doctest::Approx(p(m, l) * r(m, l) / q(m, l)).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(static_cast<void>(weight_smoothing(cpm(r, PncStage::R),
                                                       cpm(q.leftCols(4), PncStage::Q),
                                                       cpm(p, PncStage::P), 2)),
                    std::invalid_argument);
  }
}

TEST_CASE("mean_power_normalize") {
  SUBCASE("constant input normalizes to one") {
    const Matrix t = Matrix::Constant(2000, 4, 7.0);
    const auto u = mean_power_normalize(cpm(t, PncStage::T));
    CHECK(u.data(1999, 0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("scale cancels in steady state") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Matrix t(2000, 3);
    for (Index i = 0; i < t.size(); ++i) t(i) = dist(rng);
    const auto a = mean_power_normalize(cpm(t, PncStage::T));
    const auto b = mean_power_normalize(cpm(Matrix(10.0 * t), PncStage::T));
    CHECK((a.data - b.data).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("silence after content stays finite") {
    Matrix t = Matrix::Zero(200, 2);
    t.topRows(50).setConstant(2.0);
    const auto u = mean_power_normalize(cpm(t, PncStage::T));
    CHECK(u.data.allFinite());
    CHECK((u.data.array() >= 0.0).all());
  }
}

TEST_CASE("rate_level") {
  const Vector centers = Vector::LinSpaced(3, 100.0, 1000.0);

  SUBCASE("fixed points and exact powers") {
    Matrix u(1, 3);
    u << 0.0, 1.0, 32768.0;  // 2^15
    const Spectrogram out = rate_level(cpm(u, PncStage::U), 1.0 / 15.0, centers);
    CHECK(out.data(0, 0) == doctest::Approx(0.0));
    CHECK(out.data(0, 1) == doctest::Approx(1.0));
    CHECK(out.data(0, 2) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("matches the scalar pow oracle") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    Matrix u(4, 3);
    for (Index i = 0; i < u.size(); ++i) u(i) = dist(rng);
    const Spectrogram out = rate_level(cpm(u, PncStage::U), 1.0 / 15.0, centers);
    for (Index i = 0; i < u.rows(); ++i)
      for (Index j = 0; j < u.cols(); ++j)
        CHECK(out.data(i, j) == doctest::Approx(std::pow(u(i, j), 1.0 / 15.0)).epsilon(1e-12));
  }
  SUBCASE("rejects negative input") {
    Matrix u = Matrix::Constant(1, 3, -1.0);
    CHECK_THROWS_AS(static_cast<void>(rate_level(cpm(u, PncStage::U), 1.0 / 15.0, centers)),
                    std::invalid_argument);
  }
}

TEST_CASE("every stage keeps values nonnegative through the full chain") {
  std::mt19937 rng(81);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  Vector s(3200);
  for (auto& v : s) v = dist(rng);
  const AudioBuffer audio(s, 16000);
  PncConfig cfg;
  const FilterBank fb = gammatone_filterbank(16, 201, 16000, 20.0, 8000.0, true);
  const auto p = short_time_power(pre_emphasize(audio, 0.97), StftConfig{}, fb);
  const auto q = medium_time_power(p, cfg.m_window);
  const auto q0 = asymmetric_noise_suppression(q, cfg);
  const auto r = temporal_masking(q0, cfg);
  const auto t = weight_smoothing(r, q, p, cfg.smooth_neighbors);
  const auto u = mean_power_normalize(t);
  for (const auto* stage : {&p, &q, &q0, &r, &t, &u})
    CHECK((stage->data.array() >= 0.0).all());
}
