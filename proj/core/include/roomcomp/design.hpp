// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "roomcomp/signal.hpp"

namespace roomcomp::design {

enum class TargetMode { flat, sloped };

/// Level threshold (dB above the primary) allowed for added supporting
/// energy within [f_lo_hz, f_hi_hz].
struct ThresholdBand {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  double threshold_db = 0.0;

  friend bool operator==(const ThresholdBand&, const ThresholdBand&) = default;
};

struct TargetSpec {
  TargetMode mode = TargetMode::sloped;
  // Sloped mode: total drop in dB, linear in log frequency between the two
  // corner frequencies, constant outside them.
  double sloped_total_drop_db = 3.0;
  double sloped_f_lo_hz = 20.0;
  double sloped_f_hi_hz = 20000.0;
  /// Band the compensation acts in; outside it the target is the primary
  /// response itself.
  std::pair<double, double> compensation_band_hz{70.0, 20000.0};
  std::vector<ThresholdBand> precedence_thresholds{
      {70.0, 500.0, 10.0}, {500.0, 20000.0, 6.0}};
  /// Band over which the gain optimizer balances the two clamp deficits.
  std::pair<double, double> equal_deficit_band_hz{70.0, 10000.0};

  bool in_compensation_band(double f_hz) const {
    return f_hz >= compensation_band_hz.first &&
           f_hz <= compensation_band_hz.second;
  }
  void validate() const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct DesignConfig {
  std::size_t n_taps = 8192;
  std::size_t n_fft = 65536;  // analysis/design grid
  double smoothing_fraction = 1.0 / 3.0;
  double delay_s = 0.010;  // precedence delay of the supporting source
  double beta_in_band = 0.001;
  double beta_out_band = 1.0;
  /// Width of the raised-cosine crossfade (in octaves, log frequency) used
  /// just outside the compensation band so the designed curves stay
  /// realizable as short minimum-phase FIRs.
  double band_edge_transition_octaves = 1.0 / 3.0;
  int sample_rate_hz = 44100;

  void validate() const;

  friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

enum class FilterKind { traditional_inverse, proposed_supporting };

struct CompensationFilter {
  std::vector<double> taps;
  FilterKind kind = FilterKind::traditional_inverse;
  int sample_rate_hz = 44100;
  TargetSpec target;
  DesignConfig config;
};

/// Per-bin square root of the mean squared magnitude across responses.
/// All responses must share the sample rate; spectra are taken on n_fft.
MagnitudeSpectrum average_power_response(const std::vector<ImpulseResponse>& irs,
                                         std::size_t n_fft);

/// Target level in dB at one frequency, before any band replacement.
double target_level_db(const TargetSpec& spec, double reference_level_db,
                       double f_hz);

/// Target magnitude on the primary grid: the flat or sloped curve inside the
/// compensation band, the primary magnitude itself outside.
MagnitudeSpectrum build_target(const TargetSpec& spec,
                               const MagnitudeSpectrum& primary_mag,
                               double reference_level_db);

/// Allowed supporting-energy threshold at f_hz; the lower band owns a shared
/// edge. Throws outside the covered range.
double precedence_threshold_db(const TargetSpec& spec, double f_hz);

/// Scale the target by gain_db inside the compensation band only.
MagnitudeSpectrum apply_gain_in_band(const MagnitudeSpectrum& d,
                                     const TargetSpec& spec, double gain_db);

/// Clamp the target into [hp, hp * 10^(T/20)] inside the compensation band;
/// outside it the output is hp.
MagnitudeSpectrum apply_target_constraints(const MagnitudeSpectrum& d,
                                           const MagnitudeSpectrum& hp,
                                           const TargetSpec& spec);

/// Scalar gain (dB) balancing the summed below-corridor and above-corridor
/// clamp deficits over the equal-deficit band, searched in [-60, 60] dB by
/// bisection. When both deficits vanish over an interval, the gain of
/// smallest magnitude in that interval is returned.
double optimize_target_gain(const MagnitudeSpectrum& d,
                            const MagnitudeSpectrum& hp,
                            const TargetSpec& spec);

/// Supporting-source gain magnitude: sqrt(d_mod^2 - hp^2) / hs, with hs
/// floored. Throws "negative radicand" if d_mod < hp anywhere.
MagnitudeSpectrum supporting_gain_curve(const MagnitudeSpectrum& hp,
                                        const MagnitudeSpectrum& hs,
                                        const MagnitudeSpectrum& d_mod);

/// Regularized inverse: h*d / (h^2 + beta*h), with h floored and beta
/// crossfading from beta_in_band to beta_out_band just outside the
/// compensation band.
MagnitudeSpectrum traditional_gain_curve(const MagnitudeSpectrum& h,
                                         const MagnitudeSpectrum& d,
                                         const TargetSpec& spec,
                                         const DesignConfig& cfg);

/// Minimum-phase FIR realizations of the curves above. The supporting curve
/// is rolled off smoothly outside the compensation band before realization.
CompensationFilter design_supporting_filter(const MagnitudeSpectrum& hp,
                                            const MagnitudeSpectrum& hs,
                                            const MagnitudeSpectrum& d_mod,
                                            const TargetSpec& spec,
                                            const DesignConfig& cfg);
CompensationFilter design_traditional_inverse(const MagnitudeSpectrum& h,
                                              const MagnitudeSpectrum& d,
                                              const TargetSpec& spec,
                                              const DesignConfig& cfg);

/// The supporting curve after the out-of-band rolloff, as handed to the FIR
/// realization; exposed so measurements can be compared against it.
MagnitudeSpectrum tapered_supporting_curve(const MagnitudeSpectrum& w,
                                           const TargetSpec& spec,
                                           const DesignConfig& cfg);

}  // namespace roomcomp::design
