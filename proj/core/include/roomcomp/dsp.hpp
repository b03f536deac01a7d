// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roomcomp/signal.hpp"

namespace roomcomp::dsp {

/// Clamp a magnitude curve to max(values) * 10^(kMagnitudeFloorDb/20).
/// Throws std::invalid_argument if the curve is empty, contains negative or
/// non-finite values, or is identically zero ("non-positive magnitude").
std::vector<double> floor_magnitudes(const std::vector<double>& values);

/// One-sided magnitude spectrum of a signal, zero-padded (or, when allowed,
/// truncated) to n_fft. n_fft must be a power of two.
MagnitudeSpectrum dft_magnitude(const ImpulseResponse& ir, std::size_t n_fft,
                                bool allow_truncation = true);

/// Same grid as dft_magnitude but complex-valued.
ComplexSpectrum dft_complex(const ImpulseResponse& ir, std::size_t n_fft,
                            bool allow_truncation = true);

/// Power-mean smoothing with a rectangular window in log frequency: output
/// bin k averages the squared input over bins whose center frequency lies in
/// [f_k * 2^(-fraction/2), f_k * 2^(+fraction/2)], clipped at the grid edges.
/// Single-bin windows copy the input value unchanged.
MagnitudeSpectrum fractional_octave_smooth(const MagnitudeSpectrum& spec,
                                           double fraction);

/// Minimum-phase FIR whose magnitude approximates target_mag (real-cepstrum
/// construction on the target's n_fft grid, truncated to n_taps <= n_fft).
/// The target is floored per floor_magnitudes before the logarithm.
std::vector<double> minimum_phase_fir(const MagnitudeSpectrum& target_mag,
                                      std::size_t n_taps);

/// Seeded velvet-noise sequence: one +-1 pulse at a uniformly random offset
/// inside each complete grid interval of round(sample_rate/density) samples.
VelvetNoise generate_velvet_noise(double duration_s,
                                  double density_pulses_per_s,
                                  int sample_rate_hz, std::uint64_t seed);

/// Linear convolution, length a+b-1. Uses an FFT fast path above a small
/// size cutoff and direct summation below it.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);

}  // namespace roomcomp::dsp
