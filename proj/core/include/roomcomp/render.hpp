// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "roomcomp/design.hpp"
#include "roomcomp/signal.hpp"

namespace roomcomp::render {

// Geometry of one playback channel: the primary speaker, its supporting
// speaker, and the lag the supporting signal must keep at the listener.
struct SystemLayout {
  double primary_distance_m = 2.0;
  double supporting_distance_m = 2.0;
  double speed_of_sound_m_s = 343.0;
  double precedence_delay_s = 0.010;

  void validate() const;
};

// Samples of delay to insert in the supporting path so its wavefront trails
// the primary one by precedence_delay_s at the listening position. Throws if
// the supporting speaker is too far away for the lag to be achievable.
std::int64_t compute_supporting_delay_samples(const SystemLayout& layout,
                                              int sample_rate_hz);

// Classical corrected system: the filter runs in series with the primary
// speaker, so the whole response is convolved.
ImpulseResponse render_traditional(const ImpulseResponse& primary_ir,
                                   const design::CompensationFilter& filter);

// Supporting path alone: filter, then unit-energy velvet decorrelation, then
// the precedence delay. The fixed order is documented for reproducibility;
// all three are LTI so it does not affect the result mathematically.
ImpulseResponse supporting_contribution(
    const ImpulseResponse& supporting_ir,
    const design::CompensationFilter& filter, const SystemLayout& layout,
    const VelvetNoise& velvet);

// Composite system: untouched primary response plus the delayed supporting
// contribution. Samples the contribution does not reach are bit-exact copies
// of the primary response.
ImpulseResponse render_proposed(const ImpulseResponse& primary_ir,
                                const ImpulseResponse& supporting_ir,
                                const design::CompensationFilter& filter,
                                const SystemLayout& layout,
                                const VelvetNoise& velvet);

struct PrecedenceBandReport {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  double threshold_db = 0.0;
  double max_level_difference_db = 0.0;
  double margin_db = 0.0;
  bool violated = false;
};

struct PrecedenceReport {
  std::vector<PrecedenceBandReport> bands;

  bool any_violation() const;
};

// Compares the supporting level against the primary level bin by bin within
// each threshold band. Both spectra should already be fractional-octave
// smoothed and must share one grid.
PrecedenceReport verify_precedence_margin(
    const MagnitudeSpectrum& primary_mag,
    const MagnitudeSpectrum& supporting_contribution_mag,
    const design::TargetSpec& spec);

}  // namespace roomcomp::render
