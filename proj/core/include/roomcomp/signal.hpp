// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace roomcomp {

/// Uniformly sampled time-domain response.
struct ImpulseResponse {
  std::vector<double> samples;
  int sample_rate_hz = 44100;
  /// Sample index of the first wavefront, when known.
  std::optional<std::size_t> direct_onset_index;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  /// Throws std::invalid_argument on non-finite samples, non-positive rate,
  /// or an onset index past the end.
  void validate() const;
};

/// One-sided complex spectrum on a uniform DFT grid, bins 0..n_fft/2.
struct ComplexSpectrum {
  std::vector<std::complex<double>> values;
  std::size_t n_fft = 0;
  int sample_rate_hz = 44100;

  std::size_t size() const { return values.size(); }
  double bin_frequency_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
  }
};

/// One-sided magnitude spectrum on a uniform DFT grid, bins 0..n_fft/2.
struct MagnitudeSpectrum {
  std::vector<double> values;
  std::size_t n_fft = 0;
  int sample_rate_hz = 44100;

  std::size_t size() const { return values.size(); }
  double bin_frequency_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
  }
};

/// Sparse pulse train with entries in {-1, 0, +1}; exactly one nonzero entry
/// per grid interval of round(sample_rate / density) samples.
struct VelvetNoise {
  std::vector<double> samples;
  double density_pulses_per_s = 2205.0;
  std::uint64_t seed = 0;
  int sample_rate_hz = 44100;
};

inline double db_from_amplitude(double a) { return 20.0 * std::log10(a); }
inline double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }
inline double db_from_power(double p) { return 10.0 * std::log10(p); }
inline double power_from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Dynamic-range floor, relative to a curve's maximum, applied before
/// logarithms and divisions throughout the library.
inline constexpr double kMagnitudeFloorDb = -100.0;

}  // namespace roomcomp
