// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared test helpers. The transform and convolution references here are
// deliberately quadratic-time, straight-line implementations so library
// results are checked against code that shares none of their machinery.

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "roomcomp/signal.hpp"

namespace testutil {

// One-sided DFT (bins 0..n_fft/2) by direct summation.
inline std::vector<std::complex<double>> brute_dft(
    const std::vector<double>& x, std::size_t n_fft) {
  std::vector<std::complex<double>> out(n_fft / 2 + 1);
  const std::size_t n_in = x.size() < n_fft ? x.size() : n_fft;
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < n_in; ++n) {
      const double phi = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(n) / static_cast<double>(n_fft);
      acc += x[n] * std::complex<double>(std::cos(phi), std::sin(phi));
    }
    out[k] = acc;
  }
  return out;
}

// Linear convolution by direct summation.
inline std::vector<double> direct_convolve(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                         double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

// Smooth, gently wiggling magnitude curve (a few dB of variation around
// 0 dB), built from sinusoids in log frequency so it stays FIR-friendly.
inline roomcomp::MagnitudeSpectrum smooth_random_magnitude(
    std::mt19937_64& rng, std::size_t n_fft, int sample_rate_hz,
    double max_swing_db = 4.0) {
  std::uniform_real_distribution<double> amp(0.3, 1.0);
  std::uniform_real_distribution<double> rate(0.05, 0.6);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Wave {
    double a, b, c;
  };
  std::vector<Wave> waves(3);
  double total = 0.0;
  for (Wave& w : waves) {
    w = {amp(rng), rate(rng), phase(rng)};
    total += w.a;
  }
  const double scale = max_swing_db / total;
  roomcomp::MagnitudeSpectrum out;
  out.n_fft = n_fft;
  out.sample_rate_hz = sample_rate_hz;
  out.values.resize(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double f = std::max(out.bin_frequency_hz(k), 10.0);
    double level_db = 0.0;
    for (const Wave& w : waves) {
      level_db += scale * w.a * std::sin(w.b * std::log2(f) + w.c);
    }
    out.values[k] = roomcomp::amplitude_from_db(level_db);
  }
  return out;
}

// Decaying noise tail behind a unit pulse, as a stand-in room response.
inline roomcomp::ImpulseResponse synthetic_rir(std::mt19937_64& rng, int fs,
                                               std::size_t onset,
                                               std::size_t length,
                                               double t60_s) {
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  roomcomp::ImpulseResponse ir;
  ir.sample_rate_hz = fs;
  ir.samples.assign(length, 0.0);
  ir.samples[onset] = 1.0;
  const double rate = 3.0 * std::numbers::ln10 / (t60_s * fs);
  for (std::size_t i = onset + 1; i < length; ++i) {
    ir.samples[i] =
        0.3 * noise(rng) * std::exp(-rate * static_cast<double>(i - onset));
  }
  ir.direct_onset_index = onset;
  return ir;
}

inline double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

// Scoped temporary directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("roomcomp_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
