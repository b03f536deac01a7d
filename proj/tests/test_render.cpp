// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "roomcomp/dsp.hpp"
#include "roomcomp/render.hpp"
#include "test_util.hpp"

using namespace roomcomp;

namespace {

design::CompensationFilter make_filter(std::vector<double> taps,
                                       design::FilterKind kind, int fs) {
  design::CompensationFilter f;
  f.taps = std::move(taps);
  f.kind = kind;
  f.sample_rate_hz = fs;
  return f;
}

MagnitudeSpectrum flat_spectrum(std::size_t n_fft, int fs, double value) {
  MagnitudeSpectrum spec;
  spec.n_fft = n_fft;
  spec.sample_rate_hz = fs;
  spec.values.assign(n_fft / 2 + 1, value);
  return spec;
}

}  // namespace

TEST_CASE("the supporting delay compensates the path length difference") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist_m(0.5, 5.0);
  std::uniform_real_distribution<double> delay_s(0.002, 0.050);
  const int rates[] = {8000, 44100, 48000};
  for (int trial = 0; trial < 10; ++trial) {
    render::SystemLayout layout;
    layout.primary_distance_m = dist_m(rng);
    layout.supporting_distance_m = dist_m(rng);
    layout.precedence_delay_s = delay_s(rng);
    const int fs = rates[trial % 3];
    const double lag_s = layout.precedence_delay_s +
                         (layout.primary_distance_m -
                          layout.supporting_distance_m) /
                             layout.speed_of_sound_m_s;
    const std::int64_t expected = std::llround(fs * lag_s);
    if (expected < 0) {
      CHECK_THROWS_AS(render::compute_supporting_delay_samples(layout, fs),
                      std::invalid_argument);
    } else {
      CHECK(render::compute_supporting_delay_samples(layout, fs) == expected);
    }
  }
}

TEST_CASE("an unreachable lag is reported instead of rendered early") {
  render::SystemLayout layout;
  layout.primary_distance_m = 1.0;
  layout.supporting_distance_m = 3.0;
  layout.precedence_delay_s = 0.002;
  CHECK_THROWS_WITH_AS(render::compute_supporting_delay_samples(layout, 8000),
                       "supporting source cannot achieve precedence delay",
                       std::invalid_argument);
}

TEST_CASE("layout validation rejects non-physical geometry") {
  render::SystemLayout layout;
  layout.primary_distance_m = 0.0;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = {};
  layout.supporting_distance_m = -1.0;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = {};
  layout.speed_of_sound_m_s = 0.0;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = {};
  layout.precedence_delay_s = 0.001;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = {};
  layout.precedence_delay_s = 0.051;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = {};
  CHECK_NOTHROW(layout.validate());
}

TEST_CASE("the corrected system is the filter in series with the room") {
  std::mt19937_64 rng(21);
  const int fs = 8000;
  const ImpulseResponse primary = testutil::synthetic_rir(rng, fs, 30, 500, 0.15);
  std::vector<double> taps = testutil::random_vector(rng, 128, -0.1, 0.1);
  taps[0] = 1.0;
  const auto filter =
      make_filter(taps, design::FilterKind::traditional_inverse, fs);

  const ImpulseResponse out = render::render_traditional(primary, filter);
  const std::vector<double> expected =
      testutil::direct_convolve(taps, primary.samples);
  REQUIRE(out.samples.size() == expected.size());
  double peak = 0.0;
  for (double v : expected) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(out.samples[i] - expected[i]) <= 1e-9 * peak);
  }
  CHECK(out.sample_rate_hz == fs);
  CHECK(out.direct_onset_index == primary.direct_onset_index);

  const auto wrong_kind =
      make_filter(taps, design::FilterKind::proposed_supporting, fs);
  CHECK_THROWS_WITH_AS(render::render_traditional(primary, wrong_kind),
                       "filter kind mismatch", std::invalid_argument);
  const auto wrong_rate =
      make_filter(taps, design::FilterKind::traditional_inverse, 44100);
  CHECK_THROWS_AS(render::render_traditional(primary, wrong_rate),
                  std::invalid_argument);
  const auto empty =
      make_filter({}, design::FilterKind::traditional_inverse, fs);
  CHECK_THROWS_AS(render::render_traditional(primary, empty),
                  std::invalid_argument);
}

TEST_CASE("the supporting path is delay plus filtered, decorrelated energy") {
  std::mt19937_64 rng(22);
  const int fs = 8000;
  const ImpulseResponse supporting =
      testutil::synthetic_rir(rng, fs, 25, 400, 0.12);
  const auto filter = make_filter(testutil::random_vector(rng, 128, -0.2, 0.2),
                                  design::FilterKind::proposed_supporting, fs);
  render::SystemLayout layout;
  layout.primary_distance_m = 2.0;
  layout.supporting_distance_m = 1.5;
  const VelvetNoise velvet = dsp::generate_velvet_noise(0.15, 2205.0, fs, 9);
  const std::int64_t delay =
      render::compute_supporting_delay_samples(layout, fs);

  const ImpulseResponse contribution =
      render::supporting_contribution(supporting, filter, layout, velvet);

  // Reference chain built from the quadratic convolver.
  std::vector<double> unit = velvet.samples;
  const double scale = 1.0 / std::sqrt(testutil::energy(unit));
  for (double& v : unit) v *= scale;
  std::vector<double> expected(static_cast<std::size_t>(delay), 0.0);
  const std::vector<double> chain = testutil::direct_convolve(
      testutil::direct_convolve(supporting.samples, filter.taps), unit);
  expected.insert(expected.end(), chain.begin(), chain.end());

  REQUIRE(contribution.samples.size() == expected.size());
  double peak = 0.0;
  for (double v : expected) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(contribution.samples[i] - expected[i]) <= 1e-12 * peak);
  }
  for (std::int64_t i = 0; i < delay; ++i) {
    CHECK(contribution.samples[static_cast<std::size_t>(i)] == 0.0);
  }

  SUBCASE("argument screening") {
    const auto wrong_kind =
        make_filter(filter.taps, design::FilterKind::traditional_inverse, fs);
    CHECK_THROWS_WITH_AS(
        render::supporting_contribution(supporting, wrong_kind, layout, velvet),
        "filter kind mismatch", std::invalid_argument);
    VelvetNoise empty;
    empty.sample_rate_hz = fs;
    CHECK_THROWS_AS(
        render::supporting_contribution(supporting, filter, layout, empty),
        std::invalid_argument);
    VelvetNoise silent;
    silent.sample_rate_hz = fs;
    silent.samples.assign(16, 0.0);
    CHECK_THROWS_WITH_AS(
        render::supporting_contribution(supporting, filter, layout, silent),
        "silent velvet sequence", std::invalid_argument);
    VelvetNoise other_rate = velvet;
    other_rate.sample_rate_hz = 44100;
    CHECK_THROWS_AS(
        render::supporting_contribution(supporting, filter, layout, other_rate),
        std::invalid_argument);
  }
}

TEST_CASE("a single velvet pulse lands exactly at the designed delay") {
  const int fs = 44100;
  ImpulseResponse supporting;
  supporting.sample_rate_hz = fs;
  supporting.samples = {1.0};
  const auto filter =
      make_filter({1.0}, design::FilterKind::proposed_supporting, fs);
  render::SystemLayout layout;
  layout.primary_distance_m = 2.5;
  layout.supporting_distance_m = 1.0;
  // Density equal to the rate forces the pulse onto the first sample of a
  // one-sample sequence.
  const VelvetNoise velvet =
      dsp::generate_velvet_noise(1.0 / fs, fs, fs, 123);
  REQUIRE(velvet.samples.size() == 1);

  const ImpulseResponse contribution =
      render::supporting_contribution(supporting, filter, layout, velvet);
  const auto delay = static_cast<std::size_t>(
      render::compute_supporting_delay_samples(layout, fs));
  CHECK(delay == 634);  // llround(44100 * (0.010 + 1.5 / 343))
  REQUIRE(contribution.samples.size() == delay + 1);
  CHECK(std::abs(contribution.samples[delay]) == 1.0);
  for (std::size_t i = 0; i < delay; ++i) {
    CHECK(contribution.samples[i] == 0.0);
  }
}

TEST_CASE("samples the supporting path does not reach stay bit-exact") {
  std::mt19937_64 rng(23);
  const int fs = 8000;
  const ImpulseResponse primary = testutil::synthetic_rir(rng, fs, 40, 900, 0.2);
  const ImpulseResponse supporting =
      testutil::synthetic_rir(rng, fs, 50, 900, 0.2);
  const auto filter = make_filter(testutil::random_vector(rng, 64, -0.2, 0.2),
                                  design::FilterKind::proposed_supporting, fs);
  render::SystemLayout layout;
  const VelvetNoise velvet = dsp::generate_velvet_noise(0.1, 2205.0, fs, 5);

  const ImpulseResponse contribution =
      render::supporting_contribution(supporting, filter, layout, velvet);
  const ImpulseResponse proposed = render::render_proposed(
      primary, supporting, filter, layout, velvet);

  REQUIRE(proposed.samples.size() >= primary.samples.size());
  for (std::size_t i = 0; i < proposed.samples.size(); ++i) {
    const double p =
        i < primary.samples.size() ? primary.samples[i] : 0.0;
    const double c =
        i < contribution.samples.size() ? contribution.samples[i] : 0.0;
    if (c == 0.0) {
      // Bit-exact copy wherever nothing is added.
      CHECK(proposed.samples[i] == p);
    } else {
      CHECK(proposed.samples[i] == p + c);
    }
  }
  CHECK(proposed.sample_rate_hz == fs);
  CHECK(proposed.direct_onset_index == primary.direct_onset_index);
}

TEST_CASE("an all-zero filter leaves the primary response untouched") {
  std::mt19937_64 rng(24);
  const int fs = 8000;
  const ImpulseResponse primary = testutil::synthetic_rir(rng, fs, 40, 600, 0.2);
  const ImpulseResponse supporting =
      testutil::synthetic_rir(rng, fs, 45, 600, 0.2);
  const auto filter = make_filter(std::vector<double>(256, 0.0),
                                  design::FilterKind::proposed_supporting, fs);
  render::SystemLayout layout;
  const VelvetNoise velvet = dsp::generate_velvet_noise(0.1, 2205.0, fs, 6);

  const ImpulseResponse proposed = render::render_proposed(
      primary, supporting, filter, layout, velvet);
  REQUIRE(proposed.samples.size() == primary.samples.size());
  for (std::size_t i = 0; i < primary.samples.size(); ++i) {
    CHECK(proposed.samples[i] == primary.samples[i]);
  }
}

TEST_CASE("supporting energy adds nearly power-wise under decorrelation") {
  std::mt19937_64 rng(25);
  const int fs = 8000;
  const ImpulseResponse primary =
      testutil::synthetic_rir(rng, fs, 40, 3000, 0.25);
  const ImpulseResponse supporting =
      testutil::synthetic_rir(rng, fs, 50, 3000, 0.25);
  const auto filter = make_filter(testutil::random_vector(rng, 32, -0.2, 0.2),
                                  design::FilterKind::proposed_supporting, fs);
  render::SystemLayout layout;
  layout.primary_distance_m = 2.0;
  layout.supporting_distance_m = 1.5;

  const double base = testutil::energy(primary.samples);
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const VelvetNoise velvet =
        dsp::generate_velvet_noise(0.15, 2205.0, fs, seed);
    const ImpulseResponse contribution =
        render::supporting_contribution(supporting, filter, layout, velvet);
    const ImpulseResponse proposed = render::render_proposed(
        primary, supporting, filter, layout, velvet);
    const double added = testutil::energy(proposed.samples) - base;
    ratio_sum += added / testutil::energy(contribution.samples);
  }
  const double mean_ratio = ratio_sum / 5.0;
  CHECK(std::abs(db_from_power(mean_ratio)) < 1.0);
}

TEST_CASE("precedence margins measure the worst in-band level difference") {
  const design::TargetSpec spec;  // 10 dB up to 500 Hz, 6 dB above
  const std::size_t n_fft = 8192;
  const int fs = 44100;
  const MagnitudeSpectrum primary = flat_spectrum(n_fft, fs, 1.0);

  SUBCASE("matched levels use up the whole threshold in both bands") {
    const auto report =
        render::verify_precedence_margin(primary, primary, spec);
    REQUIRE(report.bands.size() == 2);
    CHECK(report.bands[0].max_level_difference_db == 0.0);
    CHECK(report.bands[1].max_level_difference_db == 0.0);
    CHECK(report.bands[0].margin_db == 10.0);
    CHECK(report.bands[1].margin_db == 6.0);
    CHECK(!report.any_violation());
  }

  SUBCASE("one hot bin violates only its own band") {
    MagnitudeSpectrum support = primary;
    const std::size_t k = 186;  // about 1 kHz, inside the upper band
    support.values[k] = amplitude_from_db(8.0);
    const auto report = render::verify_precedence_margin(primary, support, spec);
    CHECK(report.bands[0].margin_db == doctest::Approx(10.0));
    CHECK(report.bands[1].max_level_difference_db == doctest::Approx(8.0));
    CHECK(report.bands[1].margin_db == doctest::Approx(-2.0));
    CHECK(!report.bands[0].violated);
    CHECK(report.bands[1].violated);
    CHECK(report.any_violation());
  }

  SUBCASE("a silent supporting spectrum cannot violate") {
    const MagnitudeSpectrum silent = flat_spectrum(n_fft, fs, 0.0);
    const auto report = render::verify_precedence_margin(primary, silent, spec);
    for (const auto& band : report.bands) {
      CHECK(std::isinf(band.margin_db));
      CHECK(band.margin_db > 0.0);
      CHECK(!band.violated);
    }
  }

  SUBCASE("mismatched grids are rejected") {
    const MagnitudeSpectrum other = flat_spectrum(4096, fs, 1.0);
    CHECK_THROWS_WITH_AS(render::verify_precedence_margin(primary, other, spec),
                         "magnitude spectra on different grids",
                         std::invalid_argument);
  }
}
