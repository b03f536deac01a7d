// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "roomcomp/analysis.hpp"
#include "test_util.hpp"

using namespace roomcomp;

namespace {

ImpulseResponse pulse_at(std::size_t index, double value, std::size_t length,
                         int fs = 44100) {
  ImpulseResponse ir;
  ir.sample_rate_hz = fs;
  ir.samples.assign(length, 0.0);
  ir.samples[index] = value;
  return ir;
}

}  // namespace

TEST_CASE("onset detection uses a 20 dB threshold under the peak") {
  ImpulseResponse ir = pulse_at(100, 1.0, 400);
  ir.samples[50] = 0.099;  // below the 0.1 threshold
  CHECK(analysis::detect_direct_onset(ir) == 100);
  ir.samples[50] = 0.11;
  CHECK(analysis::detect_direct_onset(ir) == 50);
  ir.samples[20] = -0.2;  // sign must not matter
  CHECK(analysis::detect_direct_onset(ir) == 20);

  ImpulseResponse silent;
  silent.samples.assign(64, 0.0);
  CHECK_THROWS_AS(analysis::detect_direct_onset(silent), std::invalid_argument);
}

TEST_CASE("the split is an exact partition of the input") {
  std::mt19937_64 rng(3);
  ImpulseResponse ir = testutil::synthetic_rir(rng, 44100, 150, 4000, 0.2);

  SUBCASE("windowed") {
    const analysis::SplitIR split = analysis::split_direct_reverberant(
        ir, analysis::SplitMode::window(0.0025));
    REQUIRE(split.direct.samples.size() == ir.samples.size());
    REQUIRE(split.reverberant.samples.size() == ir.samples.size());
    for (std::size_t i = 0; i < ir.samples.size(); ++i) {
      CHECK(split.direct.samples[i] + split.reverberant.samples[i] ==
            ir.samples[i]);
    }
    // Window of +-window/2 around the onset.
    const std::size_t half = 55;  // llround(44100 * 0.0025 / 2)
    for (std::size_t i = 0; i < ir.samples.size(); ++i) {
      if (i >= 150 - half && i <= 150 + half) {
        CHECK(split.reverberant.samples[i] == 0.0);
      } else {
        CHECK(split.direct.samples[i] == 0.0);
      }
    }
    CHECK(*split.direct.direct_onset_index == 150);
  }

  SUBCASE("strict keeps only the onset sample in the direct part") {
    const analysis::SplitIR split = analysis::split_direct_reverberant(
        ir, analysis::SplitMode::strict());
    for (std::size_t i = 0; i < ir.samples.size(); ++i) {
      if (i == 150) {
        CHECK(split.direct.samples[i] == ir.samples[i]);
      } else {
        CHECK(split.direct.samples[i] == 0.0);
        CHECK(split.reverberant.samples[i] == ir.samples[i]);
      }
    }
  }

  SUBCASE("a non-positive window is rejected") {
    CHECK_THROWS_AS(analysis::split_direct_reverberant(
                        ir, analysis::SplitMode::window(0.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("the ratio of two pulses is their level difference at every bin") {
  const ImpulseResponse direct = pulse_at(10, 0.8, 512);
  const ImpulseResponse reverb = pulse_at(300, 0.2, 512);
  const double expected = db_from_amplitude(0.8 / 0.2);

  const analysis::DrrCurve raw = analysis::drr_spectrum(direct, reverb, 1024, 0.0);
  REQUIRE(raw.drr_db.size() == 513);
  CHECK(raw.frequencies_hz[256] == doctest::Approx(256.0 * 44100.0 / 1024.0));
  for (double v : raw.drr_db) CHECK(v == doctest::Approx(expected).epsilon(1e-9));

  const analysis::DrrCurve smoothed =
      analysis::drr_spectrum(direct, reverb, 1024, 1.0 / 3.0);
  for (double v : smoothed.drr_db) {
    CHECK(v == doctest::Approx(expected).epsilon(1e-9));
  }

  ImpulseResponse other_rate = reverb;
  other_rate.sample_rate_hz = 48000;
  CHECK_THROWS_AS(analysis::drr_spectrum(direct, other_rate, 1024, 0.0),
                  std::invalid_argument);
}

TEST_CASE("reverberant bins under the floor report an infinite ratio") {
  const ImpulseResponse direct = pulse_at(0, 1.0, 64);
  ImpulseResponse reverb;
  reverb.sample_rate_hz = 44100;
  reverb.samples = {1.0, -1.0};  // a differencer: null at zero frequency
  const analysis::DrrCurve curve =
      analysis::drr_spectrum(direct, reverb, 4096, 0.0);
  CHECK(std::isinf(curve.drr_db[0]));
  CHECK(curve.drr_db[0] > 0.0);
  CHECK(std::isfinite(curve.drr_db[2048]));
}

TEST_CASE("a supporting signal folds into the reverberant energy") {
  const std::size_t n = 512;
  ImpulseResponse direct = pulse_at(10, 1.0, n);
  ImpulseResponse reverb = pulse_at(60, 0.5, n);
  ImpulseResponse support = pulse_at(200, 0.3, n + 100);  // longer than the split

  analysis::SplitIR split;
  split.direct = direct;
  split.reverberant = reverb;
  const analysis::DrrCurve curve =
      analysis::drr_proposed(split, support, 2048, 0.0);

  // Reference: total reverberant signal assembled by hand.
  std::vector<double> total(n + 100, 0.0);
  total[60] = 0.5;
  total[200] += 0.3;
  const auto d_spec = testutil::brute_dft(direct.samples, 2048);
  const auto r_spec = testutil::brute_dft(total, 2048);
  for (std::size_t k = 0; k < curve.drr_db.size(); ++k) {
    const double expected =
        db_from_power(std::norm(d_spec[k]) / std::norm(r_spec[k]));
    CHECK(curve.drr_db[k] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("spectral deviation of a flat curve is exactly zero") {
  MagnitudeSpectrum flat;
  flat.n_fft = 8192;
  flat.sample_rate_hz = 44100;
  flat.values.assign(4097, 0.35);
  CHECK(analysis::spectral_deviation(flat, 100.0, 20000.0) == 0.0);
}

TEST_CASE("spectral deviation is the sample deviation of the band levels") {
  MagnitudeSpectrum spec;
  spec.n_fft = 16;
  spec.sample_rate_hz = 16000;  // bins at 0, 1000, 2000, ... 8000 Hz
  spec.values.assign(9, 1.0);
  for (std::size_t k = 1; k < spec.values.size(); k += 2) {
    spec.values[k] = amplitude_from_db(1.0);
  }
  // Band [1000, 8000]: eight bins alternating 1 dB and 0 dB.
  const double expected = std::sqrt(8.0 * 0.25 / 7.0);
  CHECK(analysis::spectral_deviation(spec, 1000.0, 8000.0) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(analysis::spectral_deviation(spec, 3000.0, 3500.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analysis::spectral_deviation(spec, 5000.0, 2000.0),
                  std::invalid_argument);
}

TEST_CASE("curve smoothing skips masked and non-finite bins") {
  analysis::DrrCurve curve;
  curve.frequencies_hz = {0.0, 100.0, 200.0, 400.0, 800.0, 1600.0};
  curve.drr_db = {5.0, 1.0, 2.0,
                  std::numeric_limits<double>::infinity(), 4.0, 6.0};

  // One-octave smoothing: the window at f spans [f/sqrt(2), f*sqrt(2)], so
  // each bin sees only itself among the octave-spaced neighbors; widen to
  // two octaves so direct neighbors enter.
  const analysis::DrrCurve wide = analysis::smooth_drr_db(curve, 2.0);
  CHECK(wide.drr_db[0] == 5.0);  // the zero-frequency bin keeps its value
  CHECK(wide.drr_db[1] == doctest::Approx((1.0 + 2.0) / 2.0));
  CHECK(wide.drr_db[2] == doctest::Approx((1.0 + 2.0) / 2.0));  // inf excluded
  CHECK(std::isinf(wide.drr_db[3]));                            // kept as is
  CHECK(wide.drr_db[4] == doctest::Approx((4.0 + 6.0) / 2.0));
  CHECK(wide.drr_db[5] == doctest::Approx((4.0 + 6.0) / 2.0));

  std::vector<std::uint8_t> mask(curve.drr_db.size(), 1);
  mask[1] = 0;
  const analysis::DrrCurve masked = analysis::smooth_drr_db(curve, 2.0, mask);
  CHECK(masked.drr_db[1] == 1.0);  // excluded bins pass through untouched
  CHECK(masked.drr_db[2] == 2.0);  // and are dropped from neighbor windows

  CHECK_THROWS_AS(analysis::smooth_drr_db(curve, 0.0), std::invalid_argument);
  mask.pop_back();
  CHECK_THROWS_AS(analysis::smooth_drr_db(curve, 1.0, mask),
                  std::invalid_argument);
  analysis::DrrCurve ragged = curve;
  ragged.frequencies_hz.pop_back();
  CHECK_THROWS_AS(analysis::smooth_drr_db(ragged, 1.0), std::invalid_argument);
}

TEST_CASE("the backward-integrated decay of an exponential is linear") {
  const int fs = 44100;
  const double r = 0.999;
  ImpulseResponse ir;
  ir.sample_rate_hz = fs;
  ir.samples.resize(5000);
  for (std::size_t i = 0; i < ir.samples.size(); ++i) {
    ir.samples[i] = std::pow(r, static_cast<double>(i));
  }
  const std::vector<double> decay = analysis::schroeder_decay_db(ir);
  CHECK(decay[0] == 0.0);
  const double slope_db = 20.0 * std::log10(r);
  for (std::size_t i = 1; i < 1000; ++i) {
    CHECK(decay[i] == doctest::Approx(slope_db * static_cast<double>(i))
                          .epsilon(1e-3));
  }
  CHECK_THROWS_AS(analysis::schroeder_decay_db(pulse_at(0, 0.0, 16)),
                  std::invalid_argument);
}

TEST_CASE("reverberation time recovers a synthetic decay rate") {
  const int fs = 44100;
  const double t60 = 0.35;
  ImpulseResponse ir;
  ir.sample_rate_hz = fs;
  ir.samples.resize(static_cast<std::size_t>(fs * 0.5));
  for (std::size_t i = 0; i < ir.samples.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    ir.samples[i] = std::pow(10.0, -3.0 * t / t60);
  }
  CHECK(analysis::estimate_t60_s(ir, 0.0) == doctest::Approx(t60).epsilon(0.01));

  // A carrier keeps the energy well above the default low-frequency cutoff,
  // so the filtered estimate agrees.
  ImpulseResponse modulated = ir;
  for (std::size_t i = 0; i < modulated.samples.size(); ++i) {
    modulated.samples[i] *=
        std::cos(2.0 * std::numbers::pi * 2000.0 * static_cast<double>(i) / fs);
  }
  CHECK(analysis::estimate_t60_s(modulated) == doctest::Approx(t60).epsilon(0.03));

  CHECK_THROWS_AS(analysis::estimate_t60_s(ir, -1.0), std::invalid_argument);
}

TEST_CASE("a response without enough decay is rejected") {
  ImpulseResponse flat;
  flat.sample_rate_hz = 44100;
  flat.samples.assign(10, 1.0);  // bottoms out at -10 dB
  CHECK_THROWS_AS(analysis::estimate_t60_s(flat, 0.0), std::invalid_argument);
}
