// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace roomcomp::fft {

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform. Size must be a power of two.
/// The inverse applies the 1/N normalization.
void transform(std::vector<std::complex<double>>& data, bool inverse);

/// One-sided spectrum (bins 0..n_fft/2) of a real signal, zero-padded or
/// truncated to n_fft.
std::vector<std::complex<double>> real_dft(std::span<const double> x,
                                           std::size_t n_fft);

}  // namespace roomcomp::fft
