// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "roomcomp/fft.hpp"

namespace roomcomp {

void ImpulseResponse::validate() const {
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("impulse response: non-positive sample rate");
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("impulse response: non-finite sample");
    }
  }
  if (direct_onset_index && *direct_onset_index >= samples.size()) {
    throw std::invalid_argument("impulse response: onset index out of range");
  }
}

}  // namespace roomcomp

namespace roomcomp::dsp {

std::vector<double> floor_magnitudes(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty magnitude curve");
  double peak = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("non-positive magnitude");
    }
    peak = std::max(peak, v);
  }
  if (peak <= 0.0) throw std::invalid_argument("non-positive magnitude");
  const double floor_v = peak * amplitude_from_db(kMagnitudeFloorDb);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::max(values[i], floor_v);
  }
  return out;
}

ComplexSpectrum dft_complex(const ImpulseResponse& ir, std::size_t n_fft,
                            bool allow_truncation) {
  if (ir.samples.empty()) throw std::invalid_argument("empty signal");
  if (!fft::is_power_of_two(n_fft)) {
    throw std::invalid_argument("n_fft must be a power of two");
  }
  if (!allow_truncation && ir.samples.size() > n_fft) {
    throw std::invalid_argument("signal longer than n_fft");
  }
  ComplexSpectrum spec;
  spec.values = fft::real_dft(ir.samples, n_fft);
  spec.n_fft = n_fft;
  spec.sample_rate_hz = ir.sample_rate_hz;
  return spec;
}

MagnitudeSpectrum dft_magnitude(const ImpulseResponse& ir, std::size_t n_fft,
                                bool allow_truncation) {
  const ComplexSpectrum spec = dft_complex(ir, n_fft, allow_truncation);
  MagnitudeSpectrum mag;
  mag.n_fft = spec.n_fft;
  mag.sample_rate_hz = spec.sample_rate_hz;
  mag.values.resize(spec.values.size());
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    mag.values[k] = std::abs(spec.values[k]);
  }
  return mag;
}

MagnitudeSpectrum fractional_octave_smooth(const MagnitudeSpectrum& spec,
                                           double fraction) {
  if (spec.values.empty()) throw std::invalid_argument("empty spectrum");
  if (!(fraction > 0.0)) {
    throw std::invalid_argument("smoothing fraction must be positive");
  }
  const std::size_t n = spec.values.size();
  const double ratio_hi = std::exp2(fraction / 2.0);
  const double ratio_lo = 1.0 / ratio_hi;
  MagnitudeSpectrum out = spec;
  for (std::size_t k = 0; k < n; ++k) {
    // Window bounds in bin index; bin frequency is proportional to index,
    // so the ratio window maps to [k*lo, k*hi]. Bin 0 only ever sees itself.
    const double eps = 1e-9;
    std::size_t j_lo = 0;
    std::size_t j_hi = 0;
    if (k > 0) {
      const double lo = static_cast<double>(k) * ratio_lo;
      const double hi = static_cast<double>(k) * ratio_hi;
      j_lo = static_cast<std::size_t>(std::ceil(lo - eps));
      j_hi = static_cast<std::size_t>(std::floor(hi + eps));
      j_lo = std::max<std::size_t>(j_lo, 1);  // bin 0 is outside any ratio window
      j_hi = std::min<std::size_t>(j_hi, n - 1);
    }
    if (j_hi <= j_lo) {
      out.values[k] = spec.values[k];  // single-bin window: exact identity
      continue;
    }
    double acc = 0.0;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      acc += spec.values[j] * spec.values[j];
    }
    out.values[k] = std::sqrt(acc / static_cast<double>(j_hi - j_lo + 1));
  }
  return out;
}

std::vector<double> minimum_phase_fir(const MagnitudeSpectrum& target_mag,
                                      std::size_t n_taps) {
  const std::size_t n_fft = target_mag.n_fft;
  if (!fft::is_power_of_two(n_fft)) {
    throw std::invalid_argument("target grid must be a power of two");
  }
  if (target_mag.values.size() != n_fft / 2 + 1) {
    throw std::invalid_argument("target grid has wrong bin count");
  }
  if (n_taps == 0 || n_taps > n_fft) {
    throw std::invalid_argument("n_taps must be in [1, n_fft]");
  }
  const std::vector<double> mag = floor_magnitudes(target_mag.values);

  // Real cepstrum of the symmetric log-magnitude spectrum.
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t k = 0; k <= n_fft / 2; ++k) {
    buf[k] = std::log(mag[k]);
  }
  for (std::size_t k = n_fft / 2 + 1; k < n_fft; ++k) {
    buf[k] = buf[n_fft - k];
  }
  fft::transform(buf, true);

  // Fold the anticausal half onto the causal half; the spectrum of the
  // folded cepstrum is the log of the minimum-phase response.
  buf[0] = buf[0].real();
  for (std::size_t n = 1; n < n_fft / 2; ++n) {
    buf[n] = 2.0 * buf[n].real();
  }
  buf[n_fft / 2] = buf[n_fft / 2].real();
  for (std::size_t n = n_fft / 2 + 1; n < n_fft; ++n) {
    buf[n] = 0.0;
  }
  fft::transform(buf, false);
  for (auto& v : buf) v = std::exp(v);
  fft::transform(buf, true);

  std::vector<double> taps(n_taps);
  for (std::size_t i = 0; i < n_taps; ++i) taps[i] = buf[i].real();
  return taps;
}

VelvetNoise generate_velvet_noise(double duration_s,
                                  double density_pulses_per_s,
                                  int sample_rate_hz, std::uint64_t seed) {
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
  if (!(duration_s > 0.0)) throw std::invalid_argument("non-positive duration");
  if (!(density_pulses_per_s > 0.0)) {
    throw std::invalid_argument("non-positive pulse density");
  }
  const auto grid = static_cast<long long>(
      std::llround(sample_rate_hz / density_pulses_per_s));
  if (grid < 1) {
    throw std::invalid_argument("pulse density exceeds sample rate");
  }
  const auto length =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  VelvetNoise noise;
  noise.samples.assign(length, 0.0);
  noise.density_pulses_per_s = density_pulses_per_s;
  noise.seed = seed;
  noise.sample_rate_hz = sample_rate_hz;

  // splitmix64: portable, deterministic across standard libraries.
  std::uint64_t state = seed;
  auto next = [&state]() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  const std::size_t n_intervals = length / static_cast<std::size_t>(grid);
  for (std::size_t i = 0; i < n_intervals; ++i) {
    const std::size_t offset =
        static_cast<std::size_t>(next() % static_cast<std::uint64_t>(grid));
    const double sign = (next() & 1ULL) ? 1.0 : -1.0;
    noise.samples[i * static_cast<std::size_t>(grid) + offset] = sign;
  }
  return noise;
}

namespace {

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += ai * b[j];
    }
  }
  return out;
}

}  // namespace

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty signal");
  const std::size_t out_len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) < 64) {
    return convolve_direct(a, b);
  }
  const std::size_t n = fft::next_power_of_two(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fft::transform(fa, false);
  fft::transform(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft::transform(fa, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace roomcomp::dsp
