// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roomcomp::fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fft: size must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // Per-call twiddle table keeps the transform state-free.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi *
                       static_cast<double>(k) / static_cast<double>(n);
    tw[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> u = data[base + j];
        const std::complex<double> v = data[base + j + half] * tw[j * step];
        data[base + j] = u + v;
        data[base + j + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= inv_n;
  }
}

std::vector<std::complex<double>> real_dft(std::span<const double> x,
                                           std::size_t n_fft) {
  if (!is_power_of_two(n_fft)) {
    throw std::invalid_argument("fft: n_fft must be a power of two");
  }
  std::vector<std::complex<double>> buf(n_fft);
  const std::size_t n_copy = std::min(x.size(), n_fft);
  for (std::size_t i = 0; i < n_copy; ++i) buf[i] = x[i];
  transform(buf, false);
  buf.resize(n_fft / 2 + 1);
  return buf;
}

}  // namespace roomcomp::fft
