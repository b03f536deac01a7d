// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/room.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomcomp/fft.hpp"

namespace roomcomp::sim {

namespace {

constexpr std::size_t kBandCount = 6;
constexpr std::size_t kBandFilterLen = 2048;  // linear phase, group delay 1024
constexpr int kSincHalf = 16;                 // 32-tap fractional-delay pulse
constexpr std::size_t kPadFront = 32;

double band_crossfade_weight(std::size_t band, double f_hz) {
  const auto& c = kOctaveBandCentersHz;
  if (f_hz <= c.front()) return band == 0 ? 1.0 : 0.0;
  if (f_hz >= c.back()) return band == kBandCount - 1 ? 1.0 : 0.0;
  for (std::size_t i = 0; i + 1 < kBandCount; ++i) {
    if (f_hz <= c[i + 1]) {
      // Neighboring centers are one octave apart, so the log2 ratio is the
      // crossfade position directly.
      const double t = std::log2(f_hz / c[i]);
      if (band == i) return 1.0 - t;
      if (band == i + 1) return t;
      return 0.0;
    }
  }
  return 0.0;
}

/// Linear-phase synthesis filters whose per-bin weights sum to one across
/// bands, so equal band gains reproduce a clean delayed pulse.
std::array<std::vector<double>, kBandCount> build_band_filters(
    int sample_rate_hz) {
  std::array<std::vector<double>, kBandCount> filters;
  const std::size_t n = kBandFilterLen;
  for (std::size_t b = 0; b < kBandCount; ++b) {
    std::vector<std::complex<double>> spec(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz /
                       static_cast<double>(n);
      spec[k] = band_crossfade_weight(b, f);
    }
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = spec[n - k];
    fft::transform(spec, true);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Rotate the zero-phase response to the window center.
      h[i] = spec[(i + n / 2) % n].real();
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double w =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(n));
      h[i] *= w;
    }
    filters[b] = std::move(h);
  }
  return filters;
}

struct Accumulator {
  std::array<std::vector<double>, kBandCount> bands;

  explicit Accumulator(std::size_t len) {
    for (auto& b : bands) b.assign(len, 0.0);
  }

  /// Add a windowed-sinc pulse at fractional position `arrival` (samples),
  /// scaled per band.
  void add_pulse(double arrival, const std::array<double, kBandCount>& amp) {
    const double center = arrival + static_cast<double>(kPadFront);
    const auto n0 = static_cast<long long>(std::floor(center));
    const double frac = center - static_cast<double>(n0);
    const double sin_pi_frac = std::sin(std::numbers::pi * frac);
    // Hann window over the 32-tap span, evaluated by rotation.
    const double step = std::numbers::pi / 16.0;
    const double u0 = static_cast<double>(-kSincHalf + 1) - frac;
    double cw = std::cos(step * u0);
    double sw = std::sin(step * u0);
    const double cd = std::cos(step);
    const double sd = std::sin(step);
    const std::size_t len = bands[0].size();
    for (int j = -kSincHalf + 1; j <= kSincHalf; ++j) {
      const double u = static_cast<double>(j) - frac;
      double pulse;
      if (std::abs(u) < 1e-12) {
        pulse = 1.0;
      } else {
        // sin(pi * (j - frac)) = -(-1)^j * sin(pi * frac)
        const double sign = (j & 1) ? 1.0 : -1.0;
        pulse = sign * sin_pi_frac / (std::numbers::pi * u);
      }
      pulse *= 0.5 * (1.0 + cw);
      const long long idx = n0 + j;
      if (idx >= 0 && static_cast<std::size_t>(idx) < len && pulse != 0.0) {
        for (std::size_t b = 0; b < kBandCount; ++b) {
          bands[b][static_cast<std::size_t>(idx)] += amp[b] * pulse;
        }
      }
      const double cn = cw * cd - sw * sd;
      sw = sw * cd + cw * sd;
      cw = cn;
    }
  }
};

/// Band-filter and sum an accumulator; output starts at the pulse time
/// origin (pad and filter group delay removed).
std::vector<double> mix_bands(
    const Accumulator& acc,
    const std::array<std::vector<std::complex<double>>, kBandCount>& filt_spec,
    std::size_t fft_len, std::size_t n_out) {
  std::vector<std::complex<double>> sum(fft_len, 0.0);
  for (std::size_t b = 0; b < kBandCount; ++b) {
    std::vector<std::complex<double>> buf(fft_len, 0.0);
    const auto& src = acc.bands[b];
    for (std::size_t i = 0; i < src.size(); ++i) buf[i] = src[i];
    fft::transform(buf, false);
    for (std::size_t i = 0; i < fft_len; ++i) sum[i] += buf[i] * filt_spec[b][i];
  }
  fft::transform(sum, true);
  std::vector<double> out(n_out, 0.0);
  const std::size_t offset = kPadFront + kBandFilterLen / 2;
  for (std::size_t i = 0; i < n_out; ++i) {
    out[i] = sum[offset + i].real();
  }
  return out;
}

void validate_position_inside(const std::array<double, 3>& p,
                              const std::array<double, 3>& dims,
                              const char* what) {
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] > 0.0) || !(p[a] < dims[a])) {
      throw std::invalid_argument(std::string(what) +
                                  " position outside room dimensions");
    }
  }
}

}  // namespace

void RoomSpec::validate() const {
  for (double d : dimensions_m) {
    if (!(d > 0.0)) throw std::invalid_argument("room dimensions must be positive");
  }
  for (const auto& surface : absorption) {
    for (double a : surface) {
      if (!(a > 0.0) || !(a <= 1.0)) {
        throw std::invalid_argument("absorption coefficients must lie in (0, 1]");
      }
    }
  }
  if (!(speed_of_sound_m_s > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  if (!(max_reflection_time_s > 0.0)) {
    throw std::invalid_argument("max reflection time must be positive");
  }
}

double directivity_gain(const SourceSpec& src, double emission_angle_deg,
                        double frequency_hz) {
  if (src.directivity.kind == DirectivityKind::omni) return 1.0;
  const Directivity& d = src.directivity;
  const double theta = emission_angle_deg * std::numbers::pi / 180.0;
  const double rear = amplitude_from_db(-d.rear_attenuation_db);
  // Cardioid-shaped high-frequency pattern, floored at the rear attenuation
  // so the null stays finite.
  const double pattern = std::max(0.5 * (1.0 + std::cos(theta)), rear);
  double t;
  if (frequency_hz <= d.transition_low_hz) {
    t = 0.0;
  } else if (frequency_hz >= d.transition_high_hz) {
    t = 1.0;
  } else {
    t = std::log(frequency_hz / d.transition_low_hz) /
        std::log(d.transition_high_hz / d.transition_low_hz);
  }
  return std::pow(pattern, t);
}

RirComponents simulate_components(const RoomSpec& room, const SourceSpec& src,
                                  const ReceiverSpec& rcv,
                                  int sample_rate_hz) {
  room.validate();
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
  validate_position_inside(src.position_m, room.dimensions_m, "source");
  validate_position_inside(rcv.position_m, room.dimensions_m, "receiver");

  const double c = room.speed_of_sound_m_s;
  const double fs = static_cast<double>(sample_rate_hz);
  double direct_r = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = src.position_m[a] - rcv.position_m[a];
    direct_r += d * d;
  }
  direct_r = std::sqrt(direct_r);
  if (!(direct_r > 1e-6)) {
    throw std::invalid_argument("source and receiver positions coincide");
  }
  const double d_max = c * room.max_reflection_time_s;
  if (direct_r > d_max) {
    throw std::invalid_argument(
        "max reflection time shorter than the direct path");
  }

  const auto n_out =
      static_cast<std::size_t>(std::llround(fs * room.max_reflection_time_s)) +
      64;
  const std::size_t n_acc = kPadFront + n_out + 48;

  // Per-axis reflection factor powers: factor = sqrt(1 - absorption), one
  // table per surface and band, up to the deepest possible image order.
  std::array<std::size_t, 3> q_span{};
  for (int a = 0; a < 3; ++a) {
    q_span[a] = static_cast<std::size_t>(
                    std::ceil(d_max / (2.0 * room.dimensions_m[a]))) +
                2;
  }
  std::array<std::array<std::vector<double>, kBandCount>, 6> refl_pow;
  for (int s = 0; s < 6; ++s) {
    const std::size_t max_hits = q_span[s / 2] + 2;
    for (std::size_t b = 0; b < kBandCount; ++b) {
      auto& tab = refl_pow[s][b];
      tab.resize(max_hits + 1);
      tab[0] = 1.0;
      const double factor = std::sqrt(1.0 - room.absorption[s][b]);
      for (std::size_t h = 1; h <= max_hits; ++h) tab[h] = tab[h - 1] * factor;
    }
  }

  const double az = src.aim_azimuth_deg * std::numbers::pi / 180.0;
  const std::array<double, 3> aim{std::cos(az), std::sin(az), 0.0};
  const bool directive = src.directivity.kind != DirectivityKind::omni;

  Accumulator direct_acc(n_acc);
  Accumulator reverb_acc(n_acc);
  const double d_max2 = d_max * d_max;

  for (int px = 0; px <= 1; ++px) {
    for (int py = 0; py <= 1; ++py) {
      for (int pz = 0; pz <= 1; ++pz) {
        const std::array<int, 3> par{px, py, pz};
        std::array<double, 3> base{};
        for (int a = 0; a < 3; ++a) {
          base[a] = (1 - 2 * par[a]) * src.position_m[a] - rcv.position_m[a];
        }
        const double lx = 2.0 * room.dimensions_m[0];
        const double ly = 2.0 * room.dimensions_m[1];
        const double lz = 2.0 * room.dimensions_m[2];
        const auto qx_lo = static_cast<long long>(std::ceil((-d_max - base[0]) / lx));
        const auto qx_hi = static_cast<long long>(std::floor((d_max - base[0]) / lx));
        for (long long qx = qx_lo; qx <= qx_hi; ++qx) {
          const double dx = lx * static_cast<double>(qx) + base[0];
          const double dx2 = dx * dx;
          if (dx2 > d_max2) continue;
          const double rem_x = std::sqrt(d_max2 - dx2);
          const auto qy_lo = static_cast<long long>(std::ceil((-rem_x - base[1]) / ly));
          const auto qy_hi = static_cast<long long>(std::floor((rem_x - base[1]) / ly));
          for (long long qy = qy_lo; qy <= qy_hi; ++qy) {
            const double dy = ly * static_cast<double>(qy) + base[1];
            const double dxy2 = dx2 + dy * dy;
            if (dxy2 > d_max2) continue;
            const double rem_y = std::sqrt(d_max2 - dxy2);
            const auto qz_lo = static_cast<long long>(std::ceil((-rem_y - base[2]) / lz));
            const auto qz_hi = static_cast<long long>(std::floor((rem_y - base[2]) / lz));
            for (long long qz = qz_lo; qz <= qz_hi; ++qz) {
              const double dz = lz * static_cast<double>(qz) + base[2];
              const double r2 = dxy2 + dz * dz;
              if (r2 > d_max2) continue;
              const double r = std::sqrt(r2);
              if (!(r > 1e-6)) continue;

              const std::array<long long, 3> q{qx, qy, qz};
              std::array<double, kBandCount> amp;
              const double inv_r = 1.0 / r;
              for (std::size_t b = 0; b < kBandCount; ++b) amp[b] = inv_r;
              for (int a = 0; a < 3; ++a) {
                const auto hits_lo =
                    static_cast<std::size_t>(std::llabs(q[a] - par[a]));
                const auto hits_hi = static_cast<std::size_t>(std::llabs(q[a]));
                if (hits_lo == 0 && hits_hi == 0) continue;
                for (std::size_t b = 0; b < kBandCount; ++b) {
                  amp[b] *= refl_pow[2 * a][b][hits_lo] *
                            refl_pow[2 * a + 1][b][hits_hi];
                }
              }
              if (directive) {
                // The image source radiates with the aim axis mirrored once
                // per odd parity axis; -d is the emission direction (image
                // toward receiver).
                double dot = 0.0;
                const std::array<double, 3> dvec{dx, dy, dz};
                for (int a = 0; a < 3; ++a) {
                  const double aim_a = par[a] ? -aim[a] : aim[a];
                  dot += aim_a * -dvec[a];
                }
                const double cos_theta = std::clamp(dot * inv_r, -1.0, 1.0);
                const double angle_deg =
                    std::acos(cos_theta) * 180.0 / std::numbers::pi;
                for (std::size_t b = 0; b < kBandCount; ++b) {
                  amp[b] *=
                      directivity_gain(src, angle_deg, kOctaveBandCentersHz[b]);
                }
              }

              const double arrival = fs * r / c;
              const bool is_direct =
                  qx == 0 && qy == 0 && qz == 0 && px == 0 && py == 0 && pz == 0;
              (is_direct ? direct_acc : reverb_acc).add_pulse(arrival, amp);
            }
          }
        }
      }
    }
  }

  const auto filters = build_band_filters(sample_rate_hz);
  const std::size_t fft_len = fft::next_power_of_two(n_acc + kBandFilterLen - 1);
  std::array<std::vector<std::complex<double>>, kBandCount> filt_spec;
  for (std::size_t b = 0; b < kBandCount; ++b) {
    filt_spec[b].assign(fft_len, 0.0);
    for (std::size_t i = 0; i < kBandFilterLen; ++i) filt_spec[b][i] = filters[b][i];
    fft::transform(filt_spec[b], false);
  }

  RirComponents out;
  out.direct.samples = mix_bands(direct_acc, filt_spec, fft_len, n_out);
  out.reverberant.samples = mix_bands(reverb_acc, filt_spec, fft_len, n_out);
  out.direct.sample_rate_hz = sample_rate_hz;
  out.reverberant.sample_rate_hz = sample_rate_hz;
  const auto onset = static_cast<std::size_t>(std::llround(fs * direct_r / c));
  out.direct.direct_onset_index = onset;
  out.reverberant.direct_onset_index = onset;
  return out;
}

ImpulseResponse simulate_rir(const RoomSpec& room, const SourceSpec& src,
                             const ReceiverSpec& rcv, int sample_rate_hz) {
  RirComponents parts = simulate_components(room, src, rcv, sample_rate_hz);
  ImpulseResponse out = std::move(parts.direct);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += parts.reverberant.samples[i];
  }
  return out;
}

}  // namespace roomcomp::sim
