// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "roomcomp/dsp.hpp"
#include "roomcomp/fft.hpp"
#include "test_util.hpp"

using namespace roomcomp;

namespace {

ImpulseResponse make_ir(std::vector<double> samples, int fs = 44100) {
  ImpulseResponse ir;
  ir.samples = std::move(samples);
  ir.sample_rate_hz = fs;
  return ir;
}

}  // namespace

TEST_CASE("power-of-two helpers") {
  CHECK(fft::is_power_of_two(1));
  CHECK(fft::is_power_of_two(2));
  CHECK(fft::is_power_of_two(1024));
  CHECK_FALSE(fft::is_power_of_two(0));
  CHECK_FALSE(fft::is_power_of_two(3));
  CHECK_FALSE(fft::is_power_of_two(1000));
  CHECK(fft::next_power_of_two(0) == 1);
  CHECK(fft::next_power_of_two(1) == 1);
  CHECK(fft::next_power_of_two(5) == 8);
  CHECK(fft::next_power_of_two(1024) == 1024);
  CHECK(fft::next_power_of_two(1025) == 2048);
}

TEST_CASE("transform round-trips random data") {
  std::mt19937_64 rng(11);
  std::vector<std::complex<double>> data(512);
  for (auto& v : data) {
    v = {std::uniform_real_distribution<double>(-1, 1)(rng),
         std::uniform_real_distribution<double>(-1, 1)(rng)};
  }
  const auto original = data;
  fft::transform(data, false);
  fft::transform(data, true);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(std::abs(data[i] - original[i]) < 1e-12);
  }
}

TEST_CASE("transform rejects non-power-of-two sizes") {
  std::vector<std::complex<double>> data(100);
  CHECK_THROWS_AS(fft::transform(data, false), std::invalid_argument);
}

TEST_CASE("real_dft matches direct summation") {
  std::mt19937_64 rng(17);
  const std::vector<double> x = testutil::random_vector(rng, 256);

  SUBCASE("exact length") {
    const auto fast = fft::real_dft(x, 256);
    const auto slow = testutil::brute_dft(x, 256);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
    }
  }
  SUBCASE("zero padding") {
    const auto fast = fft::real_dft(x, 1024);
    const auto slow = testutil::brute_dft(x, 1024);
    REQUIRE(fast.size() == 513);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
    }
  }
}

TEST_CASE("dft_magnitude measures a pure tone") {
  const int fs = 48000;
  const std::size_t n = 1024;
  const std::size_t k0 = 37;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k0) *
                    static_cast<double>(i) / static_cast<double>(n));
  }
  const MagnitudeSpectrum mag = dsp::dft_magnitude(make_ir(x, fs), n);
  REQUIRE(mag.values.size() == n / 2 + 1);
  CHECK(mag.n_fft == n);
  CHECK(mag.bin_frequency_hz(k0) == doctest::Approx(37.0 * fs / 1024.0));
  CHECK(mag.values[k0] == doctest::Approx(static_cast<double>(n) / 2.0));
  for (std::size_t k = 0; k < mag.values.size(); ++k) {
    if (k != k0) CHECK(mag.values[k] < 1e-7 * static_cast<double>(n));
  }
}

TEST_CASE("dft_magnitude truncation control") {
  std::mt19937_64 rng(23);
  const auto x = testutil::random_vector(rng, 300);
  const ImpulseResponse ir = make_ir(x);

  const MagnitudeSpectrum mag = dsp::dft_magnitude(ir, 256, true);
  const auto slow = testutil::brute_dft(x, 256);  // uses the first 256 samples
  for (std::size_t k = 0; k < mag.values.size(); ++k) {
    CHECK(mag.values[k] == doctest::Approx(std::abs(slow[k])).epsilon(1e-9));
  }

  CHECK_THROWS_AS(dsp::dft_magnitude(ir, 256, false), std::invalid_argument);
  CHECK_NOTHROW(dsp::dft_magnitude(ir, 512, false));
  CHECK_THROWS_AS(dsp::dft_magnitude(make_ir({}), 256), std::invalid_argument);
  CHECK_THROWS_AS(dsp::dft_magnitude(ir, 300), std::invalid_argument);
}

TEST_CASE("convolve matches direct summation") {
  std::mt19937_64 rng(31);
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {
      {1, 5}, {7, 13}, {64, 64}, {400, 2000}, {2048, 333}};
  for (const auto& [na, nb] : sizes) {
    CAPTURE(na);
    CAPTURE(nb);
    const auto a = testutil::random_vector(rng, na);
    const auto b = testutil::random_vector(rng, nb);
    const auto fast = dsp::convolve(a, b);
    const auto slow = testutil::direct_convolve(a, b);
    REQUIRE(fast.size() == na + nb - 1);
    double peak = 0.0;
    for (double v : slow) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(std::abs(fast[i] - slow[i]) < 1e-9 * peak);
    }
  }
}

TEST_CASE("convolving with a unit pulse is the identity") {
  std::mt19937_64 rng(37);
  const auto x = testutil::random_vector(rng, 50);
  const auto y = dsp::convolve({1.0}, x);
  CHECK(y == x);
  CHECK_THROWS_AS(dsp::convolve({}, x), std::invalid_argument);
}

TEST_CASE("fractional-octave smoothing is a power mean over a log window") {
  std::mt19937_64 rng(41);
  MagnitudeSpectrum spec;
  spec.n_fft = 2048;
  spec.sample_rate_hz = 44100;
  spec.values = testutil::random_vector(rng, 1025, 0.1, 2.0);

  for (const double fraction : {1.0 / 3.0, 1.0}) {
    CAPTURE(fraction);
    const MagnitudeSpectrum smoothed =
        dsp::fractional_octave_smooth(spec, fraction);
    const double ratio = std::exp2(fraction / 2.0);
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
      // Window: bins whose center frequency lies within the ratio band,
      // which maps to indices in [k/ratio, k*ratio]; bin 0 sits outside
      // every ratio window.
      double acc = 0.0;
      std::size_t count = 0;
      if (k > 0) {
        for (std::size_t j = 1; j < spec.values.size(); ++j) {
          const double jf = static_cast<double>(j);
          if (jf >= static_cast<double>(k) / ratio - 1e-9 &&
              jf <= static_cast<double>(k) * ratio + 1e-9) {
            acc += spec.values[j] * spec.values[j];
            ++count;
          }
        }
      }
      const double expected =
          count > 1 ? std::sqrt(acc / static_cast<double>(count))
                    : spec.values[k];
      CHECK(smoothed.values[k] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("vanishing smoothing width degenerates to the identity") {
  std::mt19937_64 rng(43);
  MagnitudeSpectrum spec;
  spec.n_fft = 1024;
  spec.sample_rate_hz = 44100;
  spec.values = testutil::random_vector(rng, 513, 0.5, 1.5);
  const MagnitudeSpectrum smoothed =
      dsp::fractional_octave_smooth(spec, 1e-12);
  CHECK(smoothed.values == spec.values);
  CHECK_THROWS_AS(dsp::fractional_octave_smooth(spec, 0.0),
                  std::invalid_argument);
}

TEST_CASE("floor_magnitudes clamps relative to the peak") {
  const std::vector<double> floored =
      dsp::floor_magnitudes({2.0, 1e-9, 0.5, 0.0});
  CHECK(floored[0] == 2.0);
  CHECK(floored[1] == doctest::Approx(2e-5).epsilon(1e-12));
  CHECK(floored[2] == 0.5);
  CHECK(floored[3] == doctest::Approx(2e-5).epsilon(1e-12));

  CHECK_THROWS_AS(dsp::floor_magnitudes({}), std::invalid_argument);
  CHECK_THROWS_AS(dsp::floor_magnitudes({1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(
      dsp::floor_magnitudes({1.0, std::numeric_limits<double>::quiet_NaN()}),
      std::invalid_argument);
  CHECK_THROWS_AS(dsp::floor_magnitudes({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("minimum_phase_fir reproduces a smooth magnitude") {
  std::mt19937_64 rng(47);
  const std::size_t n_fft = 4096;
  const MagnitudeSpectrum target =
      testutil::smooth_random_magnitude(rng, n_fft, 44100, 4.0);

  const std::vector<double> taps = dsp::minimum_phase_fir(target, n_fft);
  REQUIRE(taps.size() == n_fft);

  ImpulseResponse fir;
  fir.samples = taps;
  fir.sample_rate_hz = 44100;
  const MagnitudeSpectrum measured = dsp::dft_magnitude(fir, n_fft);
  const std::vector<double> floored = dsp::floor_magnitudes(target.values);
  for (std::size_t k = 0; k < measured.values.size(); ++k) {
    const double diff_db =
        db_from_amplitude(measured.values[k] / floored[k]);
    CHECK(std::abs(diff_db) < 0.2);
  }

  // Minimum-phase responses concentrate their energy at the head.
  double head = 0.0;
  for (std::size_t i = 0; i < n_fft / 8; ++i) head += taps[i] * taps[i];
  CHECK(head > 0.99 * testutil::energy(taps));
}

TEST_CASE("minimum_phase_fir length and argument checks") {
  std::mt19937_64 rng(53);
  const MagnitudeSpectrum target =
      testutil::smooth_random_magnitude(rng, 1024, 44100, 3.0);
  CHECK(dsp::minimum_phase_fir(target, 256).size() == 256);
  CHECK_THROWS_AS(dsp::minimum_phase_fir(target, 0), std::invalid_argument);
  CHECK_THROWS_AS(dsp::minimum_phase_fir(target, 2048), std::invalid_argument);

  MagnitudeSpectrum bad = target;
  bad.values.pop_back();
  CHECK_THROWS_AS(dsp::minimum_phase_fir(bad, 256), std::invalid_argument);
  bad = target;
  bad.n_fft = 1000;
  CHECK_THROWS_AS(dsp::minimum_phase_fir(bad, 256), std::invalid_argument);
}

TEST_CASE("velvet noise places one signed pulse per grid interval") {
  const int fs = 44100;
  const double density = 2205.0;  // grid of 20 samples
  const VelvetNoise noise = dsp::generate_velvet_noise(0.1, density, fs, 99);
  REQUIRE(noise.samples.size() == 4410);
  const std::size_t grid = 20;
  const std::size_t complete = noise.samples.size() / grid;
  for (std::size_t i = 0; i < complete; ++i) {
    std::size_t nonzero = 0;
    for (std::size_t j = i * grid; j < (i + 1) * grid; ++j) {
      const double v = noise.samples[j];
      if (v != 0.0) {
        ++nonzero;
        CHECK((v == 1.0 || v == -1.0));
      }
    }
    CHECK(nonzero == 1);
  }
  // The trailing incomplete interval stays empty.
  for (std::size_t j = complete * grid; j < noise.samples.size(); ++j) {
    CHECK(noise.samples[j] == 0.0);
  }
}

TEST_CASE("velvet noise is seed-deterministic") {
  const VelvetNoise a = dsp::generate_velvet_noise(0.5, 2205.0, 44100, 7);
  const VelvetNoise b = dsp::generate_velvet_noise(0.5, 2205.0, 44100, 7);
  const VelvetNoise c = dsp::generate_velvet_noise(0.5, 2205.0, 44100, 8);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("velvet noise at full density fills every sample") {
  const VelvetNoise dense = dsp::generate_velvet_noise(0.01, 8000.0, 8000, 3);
  REQUIRE(dense.samples.size() == 80);
  for (double v : dense.samples) CHECK((v == 1.0 || v == -1.0));
  CHECK_THROWS_AS(dsp::generate_velvet_noise(0.01, 48000.0, 8000, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsp::generate_velvet_noise(-1.0, 2205.0, 44100, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsp::generate_velvet_noise(0.1, 2205.0, 0, 3),
                  std::invalid_argument);
}
