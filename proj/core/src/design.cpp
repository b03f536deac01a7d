// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "roomcomp/dsp.hpp"

namespace roomcomp::design {

namespace {

void require_same_grid(const MagnitudeSpectrum& a, const MagnitudeSpectrum& b) {
  if (a.n_fft != b.n_fft || a.sample_rate_hz != b.sample_rate_hz ||
      a.values.size() != b.values.size()) {
    throw std::invalid_argument("magnitude spectra on different grids");
  }
}

double raised_cosine_ramp(double x) {
  // 0 at x=0, 1 at x>=1, smooth in between.
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 - 0.5 * std::cos(std::numbers::pi * x);
}

}  // namespace

void TargetSpec::validate() const {
  if (!(sloped_f_lo_hz < sloped_f_hi_hz)) {
    throw std::invalid_argument("target slope frequencies must be ascending");
  }
  if (!(sloped_f_lo_hz > 0.0)) {
    throw std::invalid_argument("target slope frequencies must be positive");
  }
  if (!(compensation_band_hz.first > 0.0) ||
      !(compensation_band_hz.first < compensation_band_hz.second)) {
    throw std::invalid_argument("compensation band must be ascending and positive");
  }
  if (precedence_thresholds.empty()) {
    throw std::invalid_argument("precedence thresholds missing");
  }
  double cursor = compensation_band_hz.first;
  for (const auto& band : precedence_thresholds) {
    if (!(band.threshold_db > 0.0)) {
      throw std::invalid_argument("precedence thresholds must be positive");
    }
    if (std::abs(band.f_lo_hz - cursor) > 1e-9 * std::max(1.0, cursor)) {
      throw std::invalid_argument(
          "precedence threshold bands must tile the compensation band");
    }
    if (!(band.f_lo_hz < band.f_hi_hz)) {
      throw std::invalid_argument("precedence threshold band must be ascending");
    }
    cursor = band.f_hi_hz;
  }
  if (std::abs(cursor - compensation_band_hz.second) >
      1e-9 * std::max(1.0, cursor)) {
    throw std::invalid_argument(
        "precedence threshold bands must tile the compensation band");
  }
  if (!(equal_deficit_band_hz.first < equal_deficit_band_hz.second) ||
      equal_deficit_band_hz.first < compensation_band_hz.first ||
      equal_deficit_band_hz.second > compensation_band_hz.second) {
    throw std::invalid_argument(
        "equal-deficit band must lie inside the compensation band");
  }
}

void DesignConfig::validate() const {
  if (n_taps == 0 || (n_taps & (n_taps - 1)) != 0) {
    throw std::invalid_argument("n_taps must be a power of two");
  }
  if (n_fft < n_taps || (n_fft & (n_fft - 1)) != 0) {
    throw std::invalid_argument("n_fft must be a power of two >= n_taps");
  }
  if (!(smoothing_fraction > 0.0)) {
    throw std::invalid_argument("smoothing fraction must be positive");
  }
  if (!(delay_s >= 0.002) || !(delay_s <= 0.050)) {
    throw std::invalid_argument("precedence delay must lie in [0.002, 0.050] s");
  }
  if (beta_in_band < 0.0 || beta_out_band < 0.0) {
    throw std::invalid_argument("regularization must be non-negative");
  }
  if (!(band_edge_transition_octaves > 0.0)) {
    throw std::invalid_argument("band edge transition must be positive");
  }
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
}

MagnitudeSpectrum average_power_response(const std::vector<ImpulseResponse>& irs,
                                         std::size_t n_fft) {
  if (irs.empty()) throw std::invalid_argument("no responses to average");
  MagnitudeSpectrum acc = dsp::dft_magnitude(irs.front(), n_fft);
  for (double& v : acc.values) v *= v;
  for (std::size_t i = 1; i < irs.size(); ++i) {
    if (irs[i].sample_rate_hz != irs.front().sample_rate_hz) {
      throw std::invalid_argument("responses have mismatched sample rates");
    }
    const MagnitudeSpectrum m = dsp::dft_magnitude(irs[i], n_fft);
    for (std::size_t k = 0; k < acc.values.size(); ++k) {
      acc.values[k] += m.values[k] * m.values[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(irs.size());
  for (double& v : acc.values) v = std::sqrt(v * inv_n);
  return acc;
}

double target_level_db(const TargetSpec& spec, double reference_level_db,
                       double f_hz) {
  if (spec.mode == TargetMode::flat) return reference_level_db;
  if (f_hz <= spec.sloped_f_lo_hz) return reference_level_db;
  if (f_hz >= spec.sloped_f_hi_hz) {
    return reference_level_db - spec.sloped_total_drop_db;
  }
  const double t = std::log10(f_hz / spec.sloped_f_lo_hz) /
                   std::log10(spec.sloped_f_hi_hz / spec.sloped_f_lo_hz);
  return reference_level_db - spec.sloped_total_drop_db * t;
}

MagnitudeSpectrum build_target(const TargetSpec& spec,
                               const MagnitudeSpectrum& primary_mag,
                               double reference_level_db) {
  spec.validate();
  MagnitudeSpectrum out = primary_mag;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double f = out.bin_frequency_hz(k);
    if (spec.in_compensation_band(f)) {
      out.values[k] = amplitude_from_db(target_level_db(spec, reference_level_db, f));
    }
  }
  return out;
}

double precedence_threshold_db(const TargetSpec& spec, double f_hz) {
  // Bands are ordered; a shared edge belongs to the lower band.
  for (const auto& band : spec.precedence_thresholds) {
    if (f_hz >= band.f_lo_hz && f_hz <= band.f_hi_hz) return band.threshold_db;
  }
  throw std::invalid_argument("frequency outside precedence threshold bands");
}

MagnitudeSpectrum apply_gain_in_band(const MagnitudeSpectrum& d,
                                     const TargetSpec& spec, double gain_db) {
  MagnitudeSpectrum out = d;
  const double g = amplitude_from_db(gain_db);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (spec.in_compensation_band(out.bin_frequency_hz(k))) {
      out.values[k] *= g;
    }
  }
  return out;
}

MagnitudeSpectrum apply_target_constraints(const MagnitudeSpectrum& d,
                                           const MagnitudeSpectrum& hp,
                                           const TargetSpec& spec) {
  require_same_grid(d, hp);
  MagnitudeSpectrum out = d;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double f = out.bin_frequency_hz(k);
    if (!spec.in_compensation_band(f)) {
      out.values[k] = hp.values[k];
      continue;
    }
    const double lo = hp.values[k];
    const double hi = lo * amplitude_from_db(precedence_threshold_db(spec, f));
    out.values[k] = std::clamp(d.values[k], lo, hi);
  }
  return out;
}

double optimize_target_gain(const MagnitudeSpectrum& d,
                            const MagnitudeSpectrum& hp,
                            const TargetSpec& spec) {
  require_same_grid(d, hp);
  const std::vector<double> hp_f = dsp::floor_magnitudes(hp.values);
  const std::vector<double> d_f = dsp::floor_magnitudes(d.values);

  struct Bin {
    double d_db;
    double hp_db;
    double lim_db;
  };
  std::vector<Bin> bins;
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    const double f = d.bin_frequency_hz(k);
    if (f < spec.equal_deficit_band_hz.first ||
        f > spec.equal_deficit_band_hz.second) {
      continue;
    }
    const double hp_db = db_from_amplitude(hp_f[k]);
    bins.push_back({db_from_amplitude(d_f[k]), hp_db,
                    hp_db + precedence_threshold_db(spec, f)});
  }
  if (bins.empty()) {
    throw std::invalid_argument("no bins inside the equal-deficit band");
  }

  const auto lower_deficit = [&bins](double g) {
    double acc = 0.0;
    for (const Bin& b : bins) acc += std::max(0.0, b.hp_db - (b.d_db + g));
    return acc;
  };
  const auto upper_deficit = [&bins](double g) {
    double acc = 0.0;
    for (const Bin& b : bins) acc += std::max(0.0, (b.d_db + g) - b.lim_db);
    return acc;
  };

  constexpr double kLo = -60.0;
  constexpr double kHi = 60.0;
  constexpr int kIters = 200;

  // Zero sets: lower_deficit vanishes on [g_low_edge, +inf), upper_deficit on
  // (-inf, g_high_edge]. If they overlap, pick the gain closest to zero.
  if (lower_deficit(kHi) == 0.0 && upper_deficit(kLo) == 0.0) {
    double g_low_edge = kLo;
    if (lower_deficit(kLo) > 0.0) {
      double a = kLo, b = kHi;
      for (int i = 0; i < kIters; ++i) {
        const double mid = 0.5 * (a + b);
        (lower_deficit(mid) > 0.0 ? a : b) = mid;
      }
      g_low_edge = b;
    }
    double g_high_edge = kHi;
    if (upper_deficit(kHi) > 0.0) {
      double a = kLo, b = kHi;
      for (int i = 0; i < kIters; ++i) {
        const double mid = 0.5 * (a + b);
        (upper_deficit(mid) > 0.0 ? b : a) = mid;
      }
      g_high_edge = a;
    }
    if (g_low_edge <= g_high_edge) {
      return std::clamp(0.0, g_low_edge, g_high_edge);
    }
  }

  const auto balance = [&](double g) { return lower_deficit(g) - upper_deficit(g); };
  if (balance(kLo) < 0.0 || balance(kHi) > 0.0) {
    throw std::invalid_argument("deficit balance unattainable");
  }
  double a = kLo, b = kHi;
  for (int i = 0; i < kIters; ++i) {
    const double mid = 0.5 * (a + b);
    (balance(mid) > 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

MagnitudeSpectrum supporting_gain_curve(const MagnitudeSpectrum& hp,
                                        const MagnitudeSpectrum& hs,
                                        const MagnitudeSpectrum& d_mod) {
  require_same_grid(hp, hs);
  require_same_grid(hp, d_mod);
  const std::vector<double> hs_f = dsp::floor_magnitudes(hs.values);
  MagnitudeSpectrum out = hp;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double dm = d_mod.values[k];
    const double p = hp.values[k];
    if (dm < p) throw std::invalid_argument("negative radicand");
    out.values[k] = std::sqrt(dm * dm - p * p) / hs_f[k];
  }
  return out;
}

MagnitudeSpectrum tapered_supporting_curve(const MagnitudeSpectrum& w,
                                           const TargetSpec& spec,
                                           const DesignConfig& cfg) {
  const double f_lo = spec.compensation_band_hz.first;
  const double f_hi = spec.compensation_band_hz.second;
  // Edge values inside the band anchor the out-of-band rolloff.
  double w_lo_edge = 0.0;
  double w_hi_edge = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    const double f = w.bin_frequency_hz(k);
    if (spec.in_compensation_band(f)) {
      if (!found) {
        w_lo_edge = w.values[k];
        found = true;
      }
      w_hi_edge = w.values[k];
    }
  }
  if (!found) throw std::invalid_argument("no bins inside the compensation band");
  MagnitudeSpectrum out = w;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double f = out.bin_frequency_hz(k);
    if (spec.in_compensation_band(f)) continue;
    double octaves;
    double edge;
    if (f < f_lo) {
      octaves = f > 0.0 ? std::log2(f_lo / f) : 1e9;
      edge = w_lo_edge;
    } else {
      octaves = std::log2(f / f_hi);
      edge = w_hi_edge;
    }
    const double ramp =
        raised_cosine_ramp(octaves / cfg.band_edge_transition_octaves);
    out.values[k] = edge * amplitude_from_db(kMagnitudeFloorDb * ramp);
  }
  return out;
}

MagnitudeSpectrum traditional_gain_curve(const MagnitudeSpectrum& h,
                                         const MagnitudeSpectrum& d,
                                         const TargetSpec& spec,
                                         const DesignConfig& cfg) {
  require_same_grid(h, d);
  const std::vector<double> h_f = dsp::floor_magnitudes(h.values);
  const double f_lo = spec.compensation_band_hz.first;
  const double f_hi = spec.compensation_band_hz.second;
  const double log_bi = std::log10(std::max(cfg.beta_in_band, 1e-12));
  const double log_bo = std::log10(std::max(cfg.beta_out_band, 1e-12));
  MagnitudeSpectrum out = h;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double f = out.bin_frequency_hz(k);
    double beta;
    if (spec.in_compensation_band(f)) {
      beta = cfg.beta_in_band;
    } else {
      const double octaves =
          f < f_lo ? (f > 0.0 ? std::log2(f_lo / f) : 1e9) : std::log2(f / f_hi);
      const double ramp =
          raised_cosine_ramp(octaves / cfg.band_edge_transition_octaves);
      if (cfg.beta_in_band <= 0.0 || cfg.beta_out_band <= 0.0) {
        beta = ramp >= 1.0 ? cfg.beta_out_band
                           : cfg.beta_in_band +
                                 (cfg.beta_out_band - cfg.beta_in_band) * ramp;
      } else {
        beta = std::pow(10.0, log_bi + (log_bo - log_bi) * ramp);
      }
    }
    const double hv = h_f[k];
    out.values[k] = hv * d.values[k] / (hv * hv + beta * hv);
  }
  return out;
}

CompensationFilter design_supporting_filter(const MagnitudeSpectrum& hp,
                                            const MagnitudeSpectrum& hs,
                                            const MagnitudeSpectrum& d_mod,
                                            const TargetSpec& spec,
                                            const DesignConfig& cfg) {
  cfg.validate();
  spec.validate();
  const MagnitudeSpectrum w = supporting_gain_curve(hp, hs, d_mod);
  if (std::all_of(w.values.begin(), w.values.end(),
                  [](double v) { return v == 0.0; })) {
    throw std::invalid_argument(
        "target never exceeds the primary response: nothing for a "
        "supporting filter to add");
  }
  const MagnitudeSpectrum tapered = tapered_supporting_curve(w, spec, cfg);
  CompensationFilter filt;
  filt.taps = dsp::minimum_phase_fir(tapered, cfg.n_taps);
  filt.kind = FilterKind::proposed_supporting;
  filt.sample_rate_hz = hp.sample_rate_hz;
  filt.target = spec;
  filt.config = cfg;
  return filt;
}

CompensationFilter design_traditional_inverse(const MagnitudeSpectrum& h,
                                              const MagnitudeSpectrum& d,
                                              const TargetSpec& spec,
                                              const DesignConfig& cfg) {
  cfg.validate();
  spec.validate();
  const MagnitudeSpectrum w = traditional_gain_curve(h, d, spec, cfg);
  CompensationFilter filt;
  filt.taps = dsp::minimum_phase_fir(w, cfg.n_taps);
  filt.kind = FilterKind::traditional_inverse;
  filt.sample_rate_hz = h.sample_rate_hz;
  filt.target = spec;
  filt.config = cfg;
  return filt;
}

}  // namespace roomcomp::design
