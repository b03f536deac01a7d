// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "roomcomp/dsp.hpp"
#include "roomcomp/fft.hpp"

namespace roomcomp::analysis {

namespace {
constexpr double kOnsetThresholdDb = -20.0;
constexpr double kReverbFloorDb = -120.0;
}  // namespace

std::size_t detect_direct_onset(const ImpulseResponse& ir) {
  double peak = 0.0;
  for (double v : ir.samples) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw std::invalid_argument("all-zero impulse response");
  const double threshold = peak * amplitude_from_db(kOnsetThresholdDb);
  for (std::size_t i = 0; i < ir.samples.size(); ++i) {
    if (std::abs(ir.samples[i]) > threshold) return i;
  }
  return ir.samples.size() - 1;  // unreachable: the peak sample qualifies
}

SplitIR split_direct_reverberant(const ImpulseResponse& ir, SplitMode mode) {
  const std::size_t n1 = detect_direct_onset(ir);
  std::size_t lo = n1;
  std::size_t hi = n1;
  if (mode.kind == SplitMode::Kind::windowed) {
    if (!(mode.window_s > 0.0)) {
      throw std::invalid_argument("non-positive split window");
    }
    const auto half = static_cast<std::size_t>(
        std::llround(ir.sample_rate_hz * mode.window_s / 2.0));
    lo = n1 > half ? n1 - half : 0;
    hi = std::min(ir.samples.size() - 1, n1 + half);
  }
  SplitIR out;
  out.mode = mode;
  out.direct.sample_rate_hz = ir.sample_rate_hz;
  out.direct.samples.assign(ir.samples.size(), 0.0);
  out.direct.direct_onset_index = n1;
  out.reverberant.sample_rate_hz = ir.sample_rate_hz;
  out.reverberant.samples.assign(ir.samples.size(), 0.0);
  for (std::size_t i = 0; i < ir.samples.size(); ++i) {
    (i >= lo && i <= hi ? out.direct.samples[i]
                        : out.reverberant.samples[i]) = ir.samples[i];
  }
  return out;
}

DrrCurve drr_spectrum(const ImpulseResponse& direct,
                      const ImpulseResponse& reverberant, std::size_t n_fft,
                      double smoothing_fraction) {
  if (direct.sample_rate_hz != reverberant.sample_rate_hz) {
    throw std::invalid_argument("sample rate mismatch");
  }
  MagnitudeSpectrum d = dsp::dft_magnitude(direct, n_fft);
  MagnitudeSpectrum r = dsp::dft_magnitude(reverberant, n_fft);
  if (smoothing_fraction > 0.0) {
    d = dsp::fractional_octave_smooth(d, smoothing_fraction);
    r = dsp::fractional_octave_smooth(r, smoothing_fraction);
  }
  double max_rev_power = 0.0;
  for (double v : r.values) max_rev_power = std::max(max_rev_power, v * v);
  const double floor_power = max_rev_power * power_from_db(kReverbFloorDb);
  DrrCurve curve;
  curve.frequencies_hz.reserve(d.values.size());
  curve.drr_db.reserve(d.values.size());
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    curve.frequencies_hz.push_back(d.bin_frequency_hz(k));
    const double rev_power = r.values[k] * r.values[k];
    if (max_rev_power == 0.0 || rev_power < floor_power) {
      curve.drr_db.push_back(std::numeric_limits<double>::infinity());
    } else {
      curve.drr_db.push_back(
          10.0 * std::log10(d.values[k] * d.values[k] / rev_power));
    }
  }
  return curve;
}

DrrCurve drr_proposed(const SplitIR& primary_split,
                      const ImpulseResponse& supporting_full,
                      std::size_t n_fft, double smoothing_fraction) {
  if (supporting_full.sample_rate_hz !=
      primary_split.reverberant.sample_rate_hz) {
    throw std::invalid_argument("sample rate mismatch");
  }
  ImpulseResponse total = primary_split.reverberant;
  if (total.samples.size() < supporting_full.samples.size()) {
    total.samples.resize(supporting_full.samples.size(), 0.0);
  }
  for (std::size_t i = 0; i < supporting_full.samples.size(); ++i) {
    if (supporting_full.samples[i] != 0.0) {
      total.samples[i] += supporting_full.samples[i];
    }
  }
  return drr_spectrum(primary_split.direct, total, n_fft, smoothing_fraction);
}

double spectral_deviation(const MagnitudeSpectrum& spec, double f_low_hz,
                          double f_high_hz) {
  if (!(f_low_hz < f_high_hz)) {
    throw std::invalid_argument("band edges must be ascending");
  }
  const std::vector<double> floored = dsp::floor_magnitudes(spec.values);
  std::vector<double> levels;
  for (std::size_t k = 0; k < floored.size(); ++k) {
    const double f = spec.bin_frequency_hz(k);
    if (f >= f_low_hz && f <= f_high_hz) {
      levels.push_back(db_from_amplitude(floored[k]));
    }
  }
  if (levels.size() < 2) {
    throw std::invalid_argument("fewer than 2 bins in band");
  }
  // Shifted mean keeps a constant curve at exactly zero deviation.
  const double base = levels.front();
  double acc = 0.0;
  for (double v : levels) acc += v - base;
  const double mean = base + acc / static_cast<double>(levels.size());
  double sum_sq = 0.0;
  for (double v : levels) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / static_cast<double>(levels.size() - 1));
}

DrrCurve smooth_drr_db(const DrrCurve& curve, double fraction,
                       const std::vector<std::uint8_t>& mask) {
  const std::size_t n = curve.drr_db.size();
  if (curve.frequencies_hz.size() != n) {
    throw std::invalid_argument("curve arrays differ in length");
  }
  if (!(fraction > 0.0)) {
    throw std::invalid_argument("smoothing fraction must be positive");
  }
  if (!mask.empty() && mask.size() != n) {
    throw std::invalid_argument("mask length mismatch");
  }
  const double ratio = std::exp2(fraction / 2.0);
  const auto included = [&](std::size_t j) {
    if (!std::isfinite(curve.drr_db[j])) return false;
    return mask.empty() || mask[j] != 0;
  };
  DrrCurve out = curve;
  for (std::size_t k = 0; k < n; ++k) {
    if (!included(k)) continue;
    const double f = curve.frequencies_hz[k];
    if (!(f > 0.0)) continue;  // the zero-frequency bin has no ratio window
    const auto first = std::lower_bound(curve.frequencies_hz.begin(),
                                        curve.frequencies_hz.end(), f / ratio);
    const auto last = std::upper_bound(curve.frequencies_hz.begin(),
                                       curve.frequencies_hz.end(), f * ratio);
    double acc = 0.0;
    std::size_t count = 0;
    for (auto it = first; it != last; ++it) {
      const auto j =
          static_cast<std::size_t>(it - curve.frequencies_hz.begin());
      if (!included(j)) continue;
      acc += curve.drr_db[j];
      ++count;
    }
    out.drr_db[k] = acc / static_cast<double>(count);
  }
  return out;
}

std::vector<double> schroeder_decay_db(const ImpulseResponse& ir) {
  if (ir.samples.empty()) throw std::invalid_argument("empty signal");
  std::vector<double> energy(ir.samples.size());
  double acc = 0.0;
  for (std::size_t i = ir.samples.size(); i-- > 0;) {
    acc += ir.samples[i] * ir.samples[i];
    energy[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("all-zero impulse response");
  std::vector<double> out(energy.size());
  for (std::size_t i = 0; i < energy.size(); ++i) {
    out[i] = energy[i] > 0.0
                 ? 10.0 * std::log10(energy[i] / acc)
                 : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double estimate_t60_s(const ImpulseResponse& ir, double f_low_hz) {
  if (ir.sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
  if (!(f_low_hz >= 0.0)) {
    throw std::invalid_argument("negative cutoff frequency");
  }
  ImpulseResponse fitted = ir;
  if (f_low_hz > 0.0 && !ir.samples.empty()) {
    const std::size_t n = fft::next_power_of_two(ir.samples.size());
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < ir.samples.size(); ++i) spec[i] = ir.samples[i];
    fft::transform(spec, false);
    const double bin_hz = static_cast<double>(ir.sample_rate_hz) / n;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      if (static_cast<double>(k) * bin_hz < f_low_hz) {
        spec[k] = 0.0;
        if (k > 0) spec[n - k] = 0.0;
      }
    }
    fft::transform(spec, true);
    for (std::size_t i = 0; i < ir.samples.size(); ++i) {
      fitted.samples[i] = spec[i].real();
    }
  }
  const std::vector<double> decay = schroeder_decay_db(fitted);
  std::size_t i5 = decay.size();
  std::size_t i25 = decay.size();
  for (std::size_t i = 0; i < decay.size(); ++i) {
    if (i5 == decay.size() && decay[i] <= -5.0) i5 = i;
    if (decay[i] <= -25.0) {
      i25 = i;
      break;
    }
  }
  if (i25 >= decay.size() || i25 < i5 + 2) {
    throw std::invalid_argument("decay range too short for a reverberation fit");
  }
  // Least-squares slope of level vs time over the -5..-25 dB stretch.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double dt = 1.0 / ir.sample_rate_hz;
  std::size_t count = 0;
  for (std::size_t i = i5; i <= i25; ++i) {
    if (!std::isfinite(decay[i])) break;
    const double x = static_cast<double>(i) * dt;
    sx += x;
    sy += decay[i];
    sxx += x * x;
    sxy += x * decay[i];
    ++count;
  }
  const double nd = static_cast<double>(count);
  const double slope = (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
  if (!(slope < 0.0)) {
    throw std::invalid_argument("decay fit has a non-negative slope");
  }
  return -60.0 / slope;
}

}  // namespace roomcomp::analysis
