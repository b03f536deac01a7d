// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "roomcomp/analysis.hpp"
#include "roomcomp/audio_file.hpp"
#include "roomcomp/dsp.hpp"
#include "roomcomp/render.hpp"
#include "roomcomp/room.hpp"

namespace roomcomp::pipeline {

namespace {

using nlohmann::json;

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

std::string csv_value(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

using CsvColumns =
    std::vector<std::pair<std::string, const std::vector<double>*>>;

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<double>& frequencies,
                     const CsvColumns& columns) {
  std::ostringstream o;
  o << "frequency_hz";
  for (const auto& [name, values] : columns) o << "," << name;
  o << "\n";
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    o << csv_value(frequencies[k]);
    for (const auto& [name, values] : columns) {
      o << "," << csv_value((*values)[k]);
    }
    o << "\n";
  }
  write_text_atomic(path, o.str());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create directory " + dir.string());
  }
}

ImpulseResponse load_ir(const std::filesystem::path& path, int expect_fs,
                        const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing " + what + " (expected " +
                             path.string() + ")");
  }
  ImpulseResponse ir = io::read_wav(path);
  if (expect_fs > 0 && ir.sample_rate_hz != expect_fs) {
    throw std::runtime_error(path.string() + ": sample rate " +
                             std::to_string(ir.sample_rate_hz) +
                             " does not match configured " +
                             std::to_string(expect_fs));
  }
  return ir;
}

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

design::CompensationFilter load_filter(const std::filesystem::path& dir,
                                       design::FilterKind kind,
                                       const std::string& channel,
                                       const config::ProjectConfig& cfg) {
  const std::filesystem::path wav_path = dir / filter_file_name(kind, channel);
  const ImpulseResponse taps_ir =
      load_ir(wav_path, cfg.sample_rate_hz,
              method_name(kind) + " filter for channel " + channel);
  std::filesystem::path sidecar = wav_path;
  sidecar.replace_extension(".json");
  const json meta = read_json(sidecar);
  const std::string kind_text = meta.value("kind", "");
  if (kind_text != method_name(kind)) {
    throw std::runtime_error("filter kind mismatch for " + wav_path.string() +
                             ": sidecar says '" + kind_text + "', expected '" +
                             method_name(kind) + "'");
  }
  design::CompensationFilter filter;
  filter.taps = taps_ir.samples;
  filter.kind = kind;
  filter.sample_rate_hz = taps_ir.sample_rate_hz;
  filter.target = cfg.target;
  filter.config = cfg.design;
  return filter;
}

MagnitudeSpectrum smoothed_magnitude(const ImpulseResponse& ir,
                                     std::size_t n_fft, double fraction) {
  return dsp::fractional_octave_smooth(dsp::dft_magnitude(ir, n_fft),
                                       fraction);
}

std::vector<std::uint8_t> finite_mask(
    const std::vector<const analysis::DrrCurve*>& curves) {
  std::vector<std::uint8_t> mask(curves.front()->drr_db.size(), 1);
  for (const auto* curve : curves) {
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!std::isfinite(curve->drr_db[k])) mask[k] = 0;
    }
  }
  return mask;
}

}  // namespace

std::string method_name(design::FilterKind kind) {
  return kind == design::FilterKind::proposed_supporting ? "proposed"
                                                         : "traditional";
}

std::string ir_file_name(const std::string& source,
                         std::size_t receiver_index) {
  return "ir_" + source + "_rcv" + std::to_string(receiver_index) + ".wav";
}

std::string filter_file_name(design::FilterKind kind,
                             const std::string& channel) {
  return "filter_" + method_name(kind) + "_" + channel + ".wav";
}

std::uint64_t velvet_seed_for(const config::ProjectConfig& cfg,
                              const std::string& channel) {
  std::uint64_t ordinal = 0;
  bool found = false;
  for (const auto& [name, ch] : cfg.channels) {
    (void)ch;
    if (name == channel) {
      found = true;
      break;
    }
    ++ordinal;
  }
  if (!found) {
    throw config::ConfigError("channels." + channel + ": unknown channel");
  }
  std::uint64_t z = cfg.seed + 0x9E3779B97F4A7C15ull * (ordinal + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

ChannelDesign design_channel(const config::ProjectConfig& cfg,
                             const std::vector<ImpulseResponse>& primary_irs,
                             const std::vector<ImpulseResponse>& supporting_irs,
                             design::FilterKind kind) {
  cfg.target.validate();
  cfg.design.validate();
  ChannelDesign out;
  out.primary_avg = dsp::fractional_octave_smooth(
      design::average_power_response(primary_irs, cfg.design.n_fft),
      cfg.design.smoothing_fraction);

  const std::vector<double> hp_f =
      dsp::floor_magnitudes(out.primary_avg.values);
  double level_sum = 0.0;
  std::size_t level_count = 0;
  for (std::size_t k = 0; k < hp_f.size(); ++k) {
    if (cfg.target.in_compensation_band(out.primary_avg.bin_frequency_hz(k))) {
      level_sum += db_from_amplitude(hp_f[k]);
      ++level_count;
    }
  }
  if (level_count == 0) {
    throw std::invalid_argument("no bins inside the compensation band");
  }
  out.reference_level_db = level_sum / static_cast<double>(level_count);

  out.target_raw = design::build_target(cfg.target, out.primary_avg,
                                        out.reference_level_db);
  out.gain_db =
      design::optimize_target_gain(out.target_raw, out.primary_avg, cfg.target);
  const MagnitudeSpectrum gained =
      design::apply_gain_in_band(out.target_raw, cfg.target, out.gain_db);
  const MagnitudeSpectrum constrained =
      design::apply_target_constraints(gained, out.primary_avg, cfg.target);

  for (std::size_t k = 0; k < constrained.values.size(); ++k) {
    if (!cfg.target.in_compensation_band(constrained.bin_frequency_hz(k))) {
      continue;
    }
    ++out.in_band_bins;
    if (constrained.values[k] > gained.values[k]) ++out.clamped_low;
    if (constrained.values[k] < gained.values[k]) ++out.clamped_high;
  }

  if (kind == design::FilterKind::proposed_supporting) {
    if (supporting_irs.empty()) {
      throw std::invalid_argument(
          "supporting responses required for the proposed method");
    }
    out.supporting_avg = dsp::fractional_octave_smooth(
        design::average_power_response(supporting_irs, cfg.design.n_fft),
        cfg.design.smoothing_fraction);
    out.target_final = constrained;
    out.filter = design::design_supporting_filter(
        out.primary_avg, out.supporting_avg, constrained, cfg.target,
        cfg.design);

    const MagnitudeSpectrum w = design::supporting_gain_curve(
        out.primary_avg, out.supporting_avg, constrained);
    const std::vector<double> hs_f =
        dsp::floor_magnitudes(out.supporting_avg.values);
    double worst = 0.0;
    for (std::size_t k = 0; k < w.values.size(); ++k) {
      if (!cfg.target.in_compensation_band(w.bin_frequency_hz(k))) continue;
      const double hp = out.primary_avg.values[k];
      const double added = w.values[k] * hs_f[k];
      const double combined = std::sqrt(hp * hp + added * added);
      const double d_mod = constrained.values[k];
      worst = std::max(worst, std::abs(combined - d_mod) / d_mod);
    }
    out.reconstruction_residual_max = worst;
  } else {
    out.target_final = gained;
    out.filter = design::design_traditional_inverse(out.primary_avg, gained,
                                                    cfg.target, cfg.design);
  }
  return out;
}

void run_simulate(const config::ProjectConfig& cfg,
                  const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  json irs = json::array();
  for (const auto& [name, src] : cfg.sources) {
    for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
      const ImpulseResponse ir =
          sim::simulate_rir(cfg.room, src, cfg.receivers[r], cfg.sample_rate_hz);
      const std::string file = ir_file_name(name, r);
      io::write_wav(out_dir / file, ir);
      json row;
      row["file"] = file;
      row["source"] = name;
      row["receiver_index"] = r;
      row["onset_index"] = ir.direct_onset_index.value();
      row["distance_m"] = distance(src.position_m, cfg.receivers[r].position_m);
      irs.push_back(row);
    }
  }
  json manifest;
  manifest["schema_version"] = 1;
  manifest["sample_rate_hz"] = cfg.sample_rate_hz;
  manifest["receiver_spacing_m"] = cfg.receiver_spacing_m();
  manifest["irs"] = irs;
  write_json(out_dir / "manifest.json", manifest);
}

void run_design(const config::ProjectConfig& cfg,
                const std::filesystem::path& ir_dir,
                const std::filesystem::path& out_dir,
                design::FilterKind kind) {
  cfg.validate();
  ensure_dir(out_dir);
  const std::string method = method_name(kind);
  json channels_report;
  for (const auto& [ch_name, ch] : cfg.channels) {
    std::vector<ImpulseResponse> primary;
    std::vector<ImpulseResponse> supporting;
    for (std::size_t r = 0; r < 2; ++r) {
      primary.push_back(
          load_ir(ir_dir / ir_file_name(ch.primary_source, r),
                  cfg.sample_rate_hz,
                  "impulse response for source " + ch.primary_source +
                      ", receiver " + std::to_string(r)));
    }
    if (kind == design::FilterKind::proposed_supporting) {
      for (std::size_t r = 0; r < 2; ++r) {
        supporting.push_back(
            load_ir(ir_dir / ir_file_name(ch.supporting_source, r),
                    cfg.sample_rate_hz,
                    "impulse response for source " + ch.supporting_source +
                        ", receiver " + std::to_string(r)));
      }
    }
    const ChannelDesign d = design_channel(cfg, primary, supporting, kind);

    ImpulseResponse taps_ir;
    taps_ir.samples = d.filter.taps;
    taps_ir.sample_rate_hz = cfg.sample_rate_hz;
    const std::string filter_file = filter_file_name(kind, ch_name);
    io::write_wav(out_dir / filter_file, taps_ir);

    json sidecar;
    sidecar["kind"] = method;
    sidecar["channel"] = ch_name;
    sidecar["n_taps"] = d.filter.taps.size();
    sidecar["sample_rate_hz"] = cfg.sample_rate_hz;
    sidecar["gain_db"] = d.gain_db;
    std::filesystem::path sidecar_path = out_dir / filter_file;
    sidecar_path.replace_extension(".json");
    write_json(sidecar_path, sidecar);

    const std::vector<double> floored =
        dsp::floor_magnitudes(d.target_final.values);
    std::vector<double> freq(floored.size());
    std::vector<double> level(floored.size());
    for (std::size_t k = 0; k < floored.size(); ++k) {
      freq[k] = d.target_final.bin_frequency_hz(k);
      level[k] = db_from_amplitude(floored[k]);
    }
    write_curve_csv(out_dir / ("target_" + method + "_" + ch_name + ".csv"),
                    freq, {{"target_level_db", &level}});

    json row;
    row["gain_db"] = d.gain_db;
    row["reference_level_db"] = d.reference_level_db;
    row["in_band_bins"] = d.in_band_bins;
    row["clamped_low_fraction"] =
        static_cast<double>(d.clamped_low) / static_cast<double>(d.in_band_bins);
    row["clamped_high_fraction"] =
        static_cast<double>(d.clamped_high) / static_cast<double>(d.in_band_bins);
    if (kind == design::FilterKind::proposed_supporting) {
      row["reconstruction_residual_max"] = d.reconstruction_residual_max;
    }
    channels_report[ch_name] = row;
  }
  json report;
  report["method"] = method;
  report["n_taps"] = cfg.design.n_taps;
  report["channels"] = channels_report;
  write_json(out_dir / ("design_report_" + method + ".json"), report);
}

void run_render(const config::ProjectConfig& cfg,
                const std::filesystem::path& ir_dir,
                const std::filesystem::path& filter_dir,
                const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  json manifest_channels;
  json precedence_channels;
  bool any_violation = false;
  for (const auto& [ch_name, ch] : cfg.channels) {
    const ImpulseResponse primary =
        load_ir(ir_dir / ir_file_name(ch.primary_source, 0),
                cfg.sample_rate_hz,
                "impulse response for source " + ch.primary_source +
                    ", receiver 0");
    const ImpulseResponse supporting_ir =
        load_ir(ir_dir / ir_file_name(ch.supporting_source, 0),
                cfg.sample_rate_hz,
                "impulse response for source " + ch.supporting_source +
                    ", receiver 0");
    const design::CompensationFilter trad_filter = load_filter(
        filter_dir, design::FilterKind::traditional_inverse, ch_name, cfg);
    const design::CompensationFilter prop_filter = load_filter(
        filter_dir, design::FilterKind::proposed_supporting, ch_name, cfg);

    const sim::RirComponents comps = sim::simulate_components(
        cfg.room, cfg.sources.at(ch.primary_source), cfg.receivers[0],
        cfg.sample_rate_hz);

    const render::SystemLayout layout = cfg.layout_for(ch_name);
    const std::int64_t delay =
        render::compute_supporting_delay_samples(layout, cfg.sample_rate_hz);
    const std::uint64_t vseed = velvet_seed_for(cfg, ch_name);
    const VelvetNoise velvet = dsp::generate_velvet_noise(
        cfg.velvet.duration_s, cfg.velvet.density_pulses_per_s,
        cfg.sample_rate_hz, vseed);

    const ImpulseResponse traditional =
        render::render_traditional(primary, trad_filter);
    const ImpulseResponse contribution = render::supporting_contribution(
        supporting_ir, prop_filter, layout, velvet);
    const ImpulseResponse proposed = render::render_proposed(
        primary, supporting_ir, prop_filter, layout, velvet);

    json files;
    const auto emit = [&](const char* key, const std::string& file,
                          const ImpulseResponse& ir) {
      io::write_wav(out_dir / file, ir);
      files[key] = file;
    };
    emit("uncompensated", "render_uncompensated_" + ch_name + ".wav", primary);
    emit("uncompensated_direct",
         "render_uncompensated_direct_" + ch_name + ".wav", comps.direct);
    emit("uncompensated_reverb",
         "render_uncompensated_reverb_" + ch_name + ".wav", comps.reverberant);
    emit("traditional", "render_traditional_" + ch_name + ".wav", traditional);
    emit("proposed", "render_proposed_" + ch_name + ".wav", proposed);
    emit("supporting_contribution", "supporting_contribution_" + ch_name + ".wav",
         contribution);
    ImpulseResponse trad_taps_ir;
    trad_taps_ir.samples = trad_filter.taps;
    trad_taps_ir.sample_rate_hz = cfg.sample_rate_hz;
    emit("traditional_filter",
         filter_file_name(design::FilterKind::traditional_inverse, ch_name),
         trad_taps_ir);
    files["velvet_seed"] = vseed;
    files["delay_samples"] = delay;
    manifest_channels[ch_name] = files;

    // The margin check compares the supporting path as it will actually play
    // (the filter stored on disk, velvet is magnitude-transparent at unit
    // energy) against the averaged responses the levels were set from.
    // Single-position spectra would add position and decorrelation noise
    // that the level constraint makes no claim about.
    std::vector<ImpulseResponse> primary_pair;
    std::vector<ImpulseResponse> supporting_pair;
    for (std::size_t r = 0; r < 2; ++r) {
      primary_pair.push_back(
          load_ir(ir_dir / ir_file_name(ch.primary_source, r),
                  cfg.sample_rate_hz,
                  "impulse response for source " + ch.primary_source +
                      ", receiver " + std::to_string(r)));
      supporting_pair.push_back(
          load_ir(ir_dir / ir_file_name(ch.supporting_source, r),
                  cfg.sample_rate_hz,
                  "impulse response for source " + ch.supporting_source +
                      ", receiver " + std::to_string(r)));
    }
    const MagnitudeSpectrum primary_mag = dsp::fractional_octave_smooth(
        design::average_power_response(primary_pair, cfg.design.n_fft),
        cfg.design.smoothing_fraction);
    const MagnitudeSpectrum supporting_mag = dsp::fractional_octave_smooth(
        design::average_power_response(supporting_pair, cfg.design.n_fft),
        cfg.design.smoothing_fraction);
    const std::vector<double> supporting_floored =
        dsp::floor_magnitudes(supporting_mag.values);
    ImpulseResponse prop_taps_ir;
    prop_taps_ir.samples = prop_filter.taps;
    prop_taps_ir.sample_rate_hz = cfg.sample_rate_hz;
    const MagnitudeSpectrum filter_mag =
        dsp::dft_magnitude(prop_taps_ir, cfg.design.n_fft);
    MagnitudeSpectrum contribution_mag = supporting_mag;
    for (std::size_t k = 0; k < contribution_mag.values.size(); ++k) {
      contribution_mag.values[k] = filter_mag.values[k] * supporting_floored[k];
    }
    const render::PrecedenceReport rep =
        render::verify_precedence_margin(primary_mag, contribution_mag,
                                         cfg.target);
    any_violation = any_violation || rep.any_violation();
    json bands = json::array();
    for (const auto& band : rep.bands) {
      json b;
      b["f_lo_hz"] = band.f_lo_hz;
      b["f_hi_hz"] = band.f_hi_hz;
      b["threshold_db"] = band.threshold_db;
      b["max_level_difference_db"] = band.max_level_difference_db;
      b["margin_db"] = band.margin_db;
      b["violated"] = band.violated;
      bands.push_back(b);
    }
    json pch;
    pch["delay_samples"] = delay;
    pch["velvet_seed"] = vseed;
    pch["bands"] = bands;
    precedence_channels[ch_name] = pch;
  }

  json manifest;
  manifest["schema_version"] = 1;
  manifest["sample_rate_hz"] = cfg.sample_rate_hz;
  manifest["n_fft"] = cfg.design.n_fft;
  manifest["smoothing_fraction"] = cfg.design.smoothing_fraction;
  manifest["channels"] = manifest_channels;
  write_json(out_dir / "render_manifest.json", manifest);

  json precedence;
  precedence["any_violation"] = any_violation;
  precedence["channels"] = precedence_channels;
  write_json(out_dir / "precedence_report.json", precedence);
}

std::vector<std::string> run_analyze(
    const std::vector<std::filesystem::path>& inputs,
    const AnalyzeOptions& options, const std::filesystem::path& out_dir) {
  if (inputs.empty()) throw std::runtime_error("no inputs to analyze");
  if (!options.drr && !options.spectral_deviation) {
    throw std::runtime_error("no metrics requested");
  }
  ensure_dir(out_dir);
  std::vector<std::string> lines;
  json report;
  json sd_values;
  const auto sd_line = [&](const std::string& name, double sd) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", sd);
    lines.push_back("S_D[" + name + "] = " + buf + " dB");
  };

  if (inputs.size() == 1 && std::filesystem::is_directory(inputs[0])) {
    const std::filesystem::path dir = inputs[0];
    const json manifest = read_json(dir / "render_manifest.json");
    const auto n_fft = manifest.at("n_fft").get<std::size_t>();
    const double fraction = manifest.at("smoothing_fraction").get<double>();
    const int fs = manifest.at("sample_rate_hz").get<int>();
    report["n_fft"] = n_fft;
    report["smoothing_fraction"] = fraction;
    for (const auto& [ch_name, ch] : manifest.at("channels").items()) {
      const auto file = [&](const char* key) {
        return dir / ch.at(key).get<std::string>();
      };
      const ImpulseResponse unc =
          load_ir(file("uncompensated"), fs, "rendered response");
      const ImpulseResponse direct =
          load_ir(file("uncompensated_direct"), fs, "direct component");
      const ImpulseResponse reverb =
          load_ir(file("uncompensated_reverb"), fs, "reverberant component");
      const ImpulseResponse trad =
          load_ir(file("traditional"), fs, "rendered response");
      const ImpulseResponse prop =
          load_ir(file("proposed"), fs, "rendered response");
      const ImpulseResponse contribution = load_ir(
          file("supporting_contribution"), fs, "supporting contribution");
      const ImpulseResponse trad_taps =
          load_ir(file("traditional_filter"), fs, "traditional filter");

      if (options.drr) {
        const analysis::DrrCurve unc_raw =
            analysis::drr_spectrum(direct, reverb, n_fft, 0.0);
        ImpulseResponse trad_direct;
        trad_direct.samples = dsp::convolve(trad_taps.samples, direct.samples);
        trad_direct.sample_rate_hz = fs;
        ImpulseResponse trad_reverb;
        trad_reverb.samples = dsp::convolve(trad_taps.samples, reverb.samples);
        trad_reverb.sample_rate_hz = fs;
        const analysis::DrrCurve trad_raw =
            analysis::drr_spectrum(trad_direct, trad_reverb, n_fft, 0.0);
        analysis::SplitIR split;
        split.direct = direct;
        split.reverberant = reverb;
        const analysis::DrrCurve prop_raw =
            analysis::drr_proposed(split, contribution, n_fft, 0.0);
        const std::vector<std::uint8_t> mask =
            finite_mask({&unc_raw, &trad_raw, &prop_raw});
        const analysis::DrrCurve unc_s =
            analysis::smooth_drr_db(unc_raw, fraction, mask);
        const analysis::DrrCurve trad_s =
            analysis::smooth_drr_db(trad_raw, fraction, mask);
        const analysis::DrrCurve prop_s =
            analysis::smooth_drr_db(prop_raw, fraction, mask);
        write_curve_csv(out_dir / ("analysis_drr_" + ch_name + ".csv"),
                        unc_raw.frequencies_hz,
                        {{"uncompensated_db", &unc_s.drr_db},
                         {"traditional_db", &trad_s.drr_db},
                         {"proposed_db", &prop_s.drr_db}});
      }
      if (options.spectral_deviation) {
        const std::vector<std::pair<std::string, const ImpulseResponse*>>
            systems = {{"uncompensated", &unc},
                       {"traditional", &trad},
                       {"proposed", &prop}};
        json per_channel;
        for (const auto& [label, ir] : systems) {
          const MagnitudeSpectrum smoothed =
              smoothed_magnitude(*ir, n_fft, fraction);
          const double sd = analysis::spectral_deviation(
              smoothed, options.sd_band_lo_hz, options.sd_band_hi_hz);
          per_channel[label] = sd;
          sd_line(ch_name + "." + label, sd);
        }
        sd_values[ch_name] = per_channel;
      }
    }
  } else {
    std::vector<ImpulseResponse> irs;
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& path : inputs) {
      irs.push_back(load_ir(path, 0, "audio file"));
      std::string stem = path.stem().string();
      if (!seen.insert(stem).second) {
        throw std::runtime_error("duplicate input name '" + stem +
                                 "': analyzed files need distinct names");
      }
      names.push_back(stem);
      if (irs.size() > 1 &&
          irs.back().sample_rate_hz != irs.front().sample_rate_hz) {
        throw std::runtime_error(path.string() +
                                 ": sample rate differs from the first input");
      }
    }
    report["n_fft"] = options.n_fft;
    report["smoothing_fraction"] = options.smoothing_fraction;

    if (options.drr) {
      std::vector<analysis::DrrCurve> raw;
      raw.reserve(irs.size());
      for (const auto& ir : irs) {
        const analysis::SplitIR split =
            analysis::split_direct_reverberant(ir, analysis::SplitMode::window());
        raw.push_back(analysis::drr_spectrum(split.direct, split.reverberant,
                                             options.n_fft, 0.0));
      }
      std::vector<const analysis::DrrCurve*> curve_ptrs;
      for (const auto& c : raw) curve_ptrs.push_back(&c);
      const std::vector<std::uint8_t> mask = finite_mask(curve_ptrs);
      std::vector<analysis::DrrCurve> smoothed;
      smoothed.reserve(raw.size());
      for (const auto& c : raw) {
        smoothed.push_back(
            analysis::smooth_drr_db(c, options.smoothing_fraction, mask));
      }
      CsvColumns columns;
      for (std::size_t i = 0; i < smoothed.size(); ++i) {
        columns.push_back({names[i] + "_db", &smoothed[i].drr_db});
      }
      write_curve_csv(out_dir / "analysis_drr.csv", raw.front().frequencies_hz,
                      columns);
    }
    if (options.spectral_deviation) {
      for (std::size_t i = 0; i < irs.size(); ++i) {
        const MagnitudeSpectrum smoothed = smoothed_magnitude(
            irs[i], options.n_fft, options.smoothing_fraction);
        const double sd = analysis::spectral_deviation(
            smoothed, options.sd_band_lo_hz, options.sd_band_hi_hz);
        sd_values[names[i]] = sd;
        sd_line(names[i], sd);
      }
    }
  }

  if (options.spectral_deviation) {
    report["spectral_deviation_band_hz"] =
        json::array({options.sd_band_lo_hz, options.sd_band_hi_hz});
    report["spectral_deviation_db"] = sd_values;
  }
  write_json(out_dir / "analysis_report.json", report);
  return lines;
}

}  // namespace roomcomp::pipeline
