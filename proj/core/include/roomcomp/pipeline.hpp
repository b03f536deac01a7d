// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roomcomp/config.hpp"
#include "roomcomp/design.hpp"
#include "roomcomp/signal.hpp"

namespace roomcomp::pipeline {

// "proposed" or "traditional"; used in artifact file names.
std::string method_name(design::FilterKind kind);

std::string ir_file_name(const std::string& source, std::size_t receiver_index);
std::string filter_file_name(design::FilterKind kind,
                             const std::string& channel);

// Velvet seed for one channel: the config seed mixed with the channel's
// position in the (sorted) channel map, so channels decorrelate against each
// other as well as against the room.
std::uint64_t velvet_seed_for(const config::ProjectConfig& cfg,
                              const std::string& channel);

// In-memory result of designing one channel's filter.
struct ChannelDesign {
  MagnitudeSpectrum primary_avg;     // smoothed average primary response
  MagnitudeSpectrum supporting_avg;  // proposed method only
  MagnitudeSpectrum target_raw;      // target before gain and constraints
  MagnitudeSpectrum target_final;    // the curve the filter aims at
  double reference_level_db = 0.0;
  double gain_db = 0.0;
  double reconstruction_residual_max = 0.0;  // proposed method only
  std::size_t in_band_bins = 0;
  std::size_t clamped_low = 0;   // target raised to the primary level
  std::size_t clamped_high = 0;  // target capped by the precedence threshold
  design::CompensationFilter filter;
};

// Designs one channel from measured responses at the two design receivers.
// supporting_irs may be empty for the traditional method.
ChannelDesign design_channel(const config::ProjectConfig& cfg,
                             const std::vector<ImpulseResponse>& primary_irs,
                             const std::vector<ImpulseResponse>& supporting_irs,
                             design::FilterKind kind);

// Simulates every (source, receiver) pair into ir_*.wav files plus
// manifest.json recording onsets and geometry.
void run_simulate(const config::ProjectConfig& cfg,
                  const std::filesystem::path& out_dir);

// Designs per-channel filters from the simulated responses in ir_dir and
// writes filter audio, target CSV, and a design report.
void run_design(const config::ProjectConfig& cfg,
                const std::filesystem::path& ir_dir,
                const std::filesystem::path& out_dir,
                design::FilterKind kind);

// Renders uncompensated, traditional, and proposed system responses at the
// first receiver and writes the precedence-margin report. Requires both
// filter kinds in filter_dir.
void run_render(const config::ProjectConfig& cfg,
                const std::filesystem::path& ir_dir,
                const std::filesystem::path& filter_dir,
                const std::filesystem::path& out_dir);

struct AnalyzeOptions {
  bool drr = true;
  bool spectral_deviation = true;
  std::size_t n_fft = 65536;
  double smoothing_fraction = 1.0 / 3.0;
  double sd_band_lo_hz = 100.0;
  double sd_band_hi_hz = 20000.0;
};

// inputs is either a single directory holding render_manifest.json (curves
// per channel for all three systems) or a list of audio files (one curve
// each, split at the detected onset). Writes CSV curves and a JSON report
// into out_dir; returns the human-readable spectral-deviation lines.
std::vector<std::string> run_analyze(
    const std::vector<std::filesystem::path>& inputs,
    const AnalyzeOptions& options, const std::filesystem::path& out_dir);

}  // namespace roomcomp::pipeline
