// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the room compensation toolkit.
//
// Subcommands:
//   simulate     room + geometry -> impulse responses
//   design       impulse responses -> compensation filters
//   render       responses + filters -> compensated system responses
//   analyze      responses -> direct/reverberant and flatness metrics
//   init-config  write a ready-to-edit default configuration
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "roomcomp/config.hpp"
#include "roomcomp/design.hpp"
#include "roomcomp/pipeline.hpp"

namespace {

struct MetricFlags {
  bool drr = false;
  bool sd = false;
};

MetricFlags parse_metrics(const std::string& list) {
  MetricFlags flags;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::size_t end = comma == std::string::npos ? list.size() : comma;
    const std::string token = list.substr(start, end - start);
    if (token == "drr") {
      flags.drr = true;
    } else if (token == "sd") {
      flags.sd = true;
    } else if (!token.empty()) {
      throw std::runtime_error("unknown metric '" + token +
                               "' (expected drr or sd)");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!flags.drr && !flags.sd) {
    throw std::runtime_error("no metrics requested");
  }
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Room compensation toolkit: simulate a listening room, design "
      "compensation filters, render the compensated system, analyze the "
      "result"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string ir_dir;
  std::string filter_dir;
  std::string method = "both";
  std::string metrics = "drr,sd";
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::size_t n_fft = 65536;
  double smoothing = 1.0 / 3.0;
  std::vector<double> band = {100.0, 20000.0};

  CLI::App* sim = app.add_subcommand(
      "simulate", "Simulate impulse responses for every source/receiver pair");
  sim->add_option("--config", config_path, "Project configuration (YAML)")
      ->required();
  sim->add_option("--out", out_path, "Output directory")->required();

  CLI::App* des = app.add_subcommand(
      "design", "Design compensation filters from simulated responses");
  des->add_option("--config", config_path, "Project configuration (YAML)")
      ->required();
  des->add_option("--ir-dir", ir_dir, "Directory written by 'simulate'")
      ->required();
  des->add_option("--out", out_path, "Output directory")->required();
  des->add_option("--method", method, "Filter family to design (default both)")
      ->check(CLI::IsMember({"proposed", "traditional", "both"}));

  CLI::App* ren = app.add_subcommand(
      "render", "Render compensated responses at the listening position");
  ren->add_option("--config", config_path, "Project configuration (YAML)")
      ->required();
  ren->add_option("--ir-dir", ir_dir, "Directory written by 'simulate'")
      ->required();
  ren->add_option("--filter-dir", filter_dir, "Directory written by 'design'")
      ->required();
  ren->add_option("--out", out_path, "Output directory")->required();
  CLI::Option* seed_opt = ren->add_option(
      "--seed", seed, "Override the decorrelation seed from the config");

  CLI::App* ana = app.add_subcommand(
      "analyze",
      "Compute direct-to-reverberant curves and spectral deviation");
  ana->add_option("inputs", inputs,
                  "A directory written by 'render', or audio files")
      ->required();
  ana->add_option("--out", out_path, "Output directory")->required();
  ana->add_option("--metrics", metrics, "Comma list of: drr, sd");
  ana->add_option("--n-fft", n_fft,
                  "Analysis transform size for plain audio files");
  ana->add_option("--smoothing", smoothing,
                  "Fractional-octave smoothing width for plain audio files");
  ana->add_option("--band", band, "Spectral deviation band in Hz (low high)")
      ->expected(2);

  CLI::App* init = app.add_subcommand(
      "init-config", "Write a ready-to-edit default configuration");
  init->add_option("--out", out_path, "Destination file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      const roomcomp::config::ProjectConfig cfg =
          roomcomp::config::load_config(config_path);
      roomcomp::pipeline::run_simulate(cfg, out_path);
    } else if (des->parsed()) {
      const roomcomp::config::ProjectConfig cfg =
          roomcomp::config::load_config(config_path);
      if (method == "traditional" || method == "both") {
        roomcomp::pipeline::run_design(
            cfg, ir_dir, out_path,
            roomcomp::design::FilterKind::traditional_inverse);
      }
      if (method == "proposed" || method == "both") {
        roomcomp::pipeline::run_design(
            cfg, ir_dir, out_path,
            roomcomp::design::FilterKind::proposed_supporting);
      }
    } else if (ren->parsed()) {
      roomcomp::config::ProjectConfig cfg =
          roomcomp::config::load_config(config_path);
      if (seed_opt->count() > 0) cfg.seed = seed;
      roomcomp::pipeline::run_render(cfg, ir_dir, filter_dir, out_path);
    } else if (ana->parsed()) {
      const MetricFlags flags = parse_metrics(metrics);
      roomcomp::pipeline::AnalyzeOptions options;
      options.drr = flags.drr;
      options.spectral_deviation = flags.sd;
      options.n_fft = n_fft;
      options.smoothing_fraction = smoothing;
      options.sd_band_lo_hz = band[0];
      options.sd_band_hi_hz = band[1];
      std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
      const std::vector<std::string> lines =
          roomcomp::pipeline::run_analyze(paths, options, out_path);
      for (const std::string& line : lines) std::cout << line << "\n";
    } else if (init->parsed()) {
      const roomcomp::config::ProjectConfig cfg =
          roomcomp::config::default_config();
      if (out_path.empty()) {
        std::cout << roomcomp::config::serialize_config(cfg);
      } else {
        roomcomp::config::save_config(out_path, cfg);
      }
    }
  } catch (const roomcomp::config::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
