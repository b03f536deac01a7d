// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roomcomp/signal.hpp"

namespace roomcomp::analysis {

// Direct-to-reverberant ratio as a function of frequency. Bins where the
// reverberant energy sits below the numerical floor carry +infinity.
struct DrrCurve {
  std::vector<double> frequencies_hz;
  std::vector<double> drr_db;
};

struct SplitMode {
  enum class Kind { strict_sample, windowed };
  Kind kind = Kind::windowed;
  double window_s = 0.0025;

  static SplitMode strict() { return {Kind::strict_sample, 0.0}; }
  static SplitMode window(double seconds = 0.0025) {
    return {Kind::windowed, seconds};
  }
};

// Exact partition of an impulse response: direct + reverberant == input,
// sample for sample. Both parts keep the input's length.
struct SplitIR {
  ImpulseResponse direct;
  ImpulseResponse reverberant;
  SplitMode mode;
};

// Index of the first sample whose magnitude exceeds the absolute peak
// lowered by 20 dB. Throws on an all-zero response.
std::size_t detect_direct_onset(const ImpulseResponse& ir);

SplitIR split_direct_reverberant(const ImpulseResponse& ir, SplitMode mode);

// drr_db[k] = 10 log10(smooth(|D|^2)[k] / smooth(|R|^2)[k]). Pass a
// non-positive smoothing fraction to compare raw bins.
DrrCurve drr_spectrum(const ImpulseResponse& direct,
                      const ImpulseResponse& reverberant, std::size_t n_fft,
                      double smoothing_fraction);

// DRR with a supporting contribution folded into the reverberant part in the
// time domain before transforming.
DrrCurve drr_proposed(const SplitIR& primary_split,
                      const ImpulseResponse& supporting_full,
                      std::size_t n_fft, double smoothing_fraction);

// Sample standard deviation, in dB, of the level curve over bins whose
// frequency lies in [f_low_hz, f_high_hz].
double spectral_deviation(const MagnitudeSpectrum& spec, double f_low_hz,
                          double f_high_hz);

// Arithmetic fractional-octave smoothing of a dB curve. Non-finite bins and
// bins with mask[k] == 0 keep their value and are excluded from every
// window; an empty mask admits all finite bins.
DrrCurve smooth_drr_db(const DrrCurve& curve, double fraction,
                       const std::vector<std::uint8_t>& mask = {});

// Backward-integrated energy decay, normalized to 0 dB at the first sample.
std::vector<double> schroeder_decay_db(const ImpulseResponse& ir);

// Reverberation time from a least-squares fit of the Schroeder decay between
// -5 and -25 dB, extrapolated to a 60 dB drop. Content below f_low_hz is
// removed before integration so sub-audio drift does not flatten the fit;
// pass 0 to fit the raw response.
double estimate_t60_s(const ImpulseResponse& ir, double f_low_hz = 80.0);

}  // namespace roomcomp::analysis
