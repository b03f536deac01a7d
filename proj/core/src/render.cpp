// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roomcomp/dsp.hpp"

namespace roomcomp::render {

void SystemLayout::validate() const {
  if (!(primary_distance_m > 0.0) || !(supporting_distance_m > 0.0)) {
    throw std::invalid_argument("speaker distances must be positive");
  }
  if (!(speed_of_sound_m_s > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  if (!(precedence_delay_s >= 0.002) || !(precedence_delay_s <= 0.050)) {
    throw std::invalid_argument("precedence delay must lie in [0.002, 0.050] s");
  }
}

std::int64_t compute_supporting_delay_samples(const SystemLayout& layout,
                                              int sample_rate_hz) {
  layout.validate();
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
  const double lag_s =
      layout.precedence_delay_s +
      (layout.primary_distance_m - layout.supporting_distance_m) /
          layout.speed_of_sound_m_s;
  const std::int64_t n = std::llround(sample_rate_hz * lag_s);
  if (n < 0) {
    throw std::invalid_argument(
        "supporting source cannot achieve precedence delay");
  }
  return n;
}

ImpulseResponse render_traditional(const ImpulseResponse& primary_ir,
                                   const design::CompensationFilter& filter) {
  if (filter.kind != design::FilterKind::traditional_inverse) {
    throw std::invalid_argument("filter kind mismatch");
  }
  if (filter.sample_rate_hz != primary_ir.sample_rate_hz) {
    throw std::invalid_argument("sample rate mismatch");
  }
  if (filter.taps.empty()) throw std::invalid_argument("empty filter");
  ImpulseResponse out;
  out.samples = dsp::convolve(filter.taps, primary_ir.samples);
  out.sample_rate_hz = primary_ir.sample_rate_hz;
  // Minimum-phase taps concentrate energy at the head, so the onset index
  // carries over.
  out.direct_onset_index = primary_ir.direct_onset_index;
  return out;
}

ImpulseResponse supporting_contribution(
    const ImpulseResponse& supporting_ir,
    const design::CompensationFilter& filter, const SystemLayout& layout,
    const VelvetNoise& velvet) {
  if (filter.kind != design::FilterKind::proposed_supporting) {
    throw std::invalid_argument("filter kind mismatch");
  }
  if (filter.sample_rate_hz != supporting_ir.sample_rate_hz ||
      velvet.sample_rate_hz != supporting_ir.sample_rate_hz) {
    throw std::invalid_argument("sample rate mismatch");
  }
  if (filter.taps.empty()) throw std::invalid_argument("empty filter");
  if (velvet.samples.empty()) throw std::invalid_argument("empty velvet sequence");
  const std::int64_t delay = compute_supporting_delay_samples(
      layout, supporting_ir.sample_rate_hz);

  // Unit total energy keeps the decorrelator transparent in the power sense.
  double energy = 0.0;
  for (double v : velvet.samples) energy += v * v;
  if (!(energy > 0.0)) throw std::invalid_argument("silent velvet sequence");
  std::vector<double> velvet_unit = velvet.samples;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : velvet_unit) v *= scale;

  const std::vector<double> filtered =
      dsp::convolve(supporting_ir.samples, filter.taps);
  const std::vector<double> decorrelated = dsp::convolve(filtered, velvet_unit);

  ImpulseResponse out;
  out.sample_rate_hz = supporting_ir.sample_rate_hz;
  out.samples.assign(static_cast<std::size_t>(delay), 0.0);
  out.samples.insert(out.samples.end(), decorrelated.begin(),
                     decorrelated.end());
  return out;
}

ImpulseResponse render_proposed(const ImpulseResponse& primary_ir,
                                const ImpulseResponse& supporting_ir,
                                const design::CompensationFilter& filter,
                                const SystemLayout& layout,
                                const VelvetNoise& velvet) {
  if (primary_ir.sample_rate_hz != supporting_ir.sample_rate_hz) {
    throw std::invalid_argument("sample rate mismatch");
  }
  const ImpulseResponse contribution =
      supporting_contribution(supporting_ir, filter, layout, velvet);

  ImpulseResponse out = primary_ir;
  std::size_t last_nonzero = 0;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < contribution.samples.size(); ++i) {
    if (contribution.samples[i] != 0.0) {
      last_nonzero = i;
      any_nonzero = true;
    }
  }
  if (any_nonzero && last_nonzero >= out.samples.size()) {
    out.samples.resize(last_nonzero + 1, 0.0);
  }
  // Zero addends are skipped so untouched samples stay bit-exact.
  for (std::size_t i = 0; i < contribution.samples.size(); ++i) {
    if (contribution.samples[i] != 0.0) out.samples[i] += contribution.samples[i];
  }
  return out;
}

bool PrecedenceReport::any_violation() const {
  for (const auto& band : bands) {
    if (band.violated) return true;
  }
  return false;
}

PrecedenceReport verify_precedence_margin(
    const MagnitudeSpectrum& primary_mag,
    const MagnitudeSpectrum& supporting_contribution_mag,
    const design::TargetSpec& spec) {
  if (primary_mag.n_fft != supporting_contribution_mag.n_fft ||
      primary_mag.sample_rate_hz != supporting_contribution_mag.sample_rate_hz ||
      primary_mag.values.size() != supporting_contribution_mag.values.size()) {
    throw std::invalid_argument("magnitude spectra on different grids");
  }
  spec.validate();
  PrecedenceReport report;
  report.bands.reserve(spec.precedence_thresholds.size());
  for (const auto& band : spec.precedence_thresholds) {
    PrecedenceBandReport row;
    row.f_lo_hz = band.f_lo_hz;
    row.f_hi_hz = band.f_hi_hz;
    row.threshold_db = band.threshold_db;
    row.max_level_difference_db = -std::numeric_limits<double>::infinity();
    report.bands.push_back(row);
  }
  for (std::size_t k = 0; k < primary_mag.values.size(); ++k) {
    const double f = primary_mag.bin_frequency_hz(k);
    // A shared band edge belongs to the lower band, matching the threshold
    // lookup used at design time.
    std::size_t band_index = report.bands.size();
    for (std::size_t b = 0; b < report.bands.size(); ++b) {
      if (f >= report.bands[b].f_lo_hz && f <= report.bands[b].f_hi_hz) {
        band_index = b;
        break;
      }
    }
    if (band_index == report.bands.size()) continue;
    const double sup = supporting_contribution_mag.values[k];
    if (!(sup > 0.0)) continue;
    const double pri = primary_mag.values[k];
    const double diff = pri > 0.0 ? db_from_amplitude(sup / pri)
                                  : std::numeric_limits<double>::infinity();
    auto& row = report.bands[band_index];
    row.max_level_difference_db = std::max(row.max_level_difference_db, diff);
  }
  for (auto& row : report.bands) {
    row.margin_db = row.threshold_db - row.max_level_difference_db;
    row.violated = row.max_level_difference_db > row.threshold_db;
  }
  return report;
}

}  // namespace roomcomp::render
