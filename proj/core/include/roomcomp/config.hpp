// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomcomp/design.hpp"
#include "roomcomp/render.hpp"
#include "roomcomp/room.hpp"

namespace roomcomp::config {

// Anything wrong with a configuration: unreadable file, malformed document,
// missing or unknown keys, values out of range. Messages name the offending
// field, e.g. "sources.primary_left.position_m: outside room dimensions".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One playback channel pairs a primary speaker with its supporting speaker.
struct ChannelSpec {
  std::string primary_source;
  std::string supporting_source;
  double precedence_delay_s = 0.010;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

struct VelvetConfig {
  double duration_s = 1.0;
  double density_pulses_per_s = 2205.0;

  friend bool operator==(const VelvetConfig&, const VelvetConfig&) = default;
};

struct ProjectConfig {
  int schema_version = 1;
  int sample_rate_hz = 44100;
  std::uint64_t seed = 1;
  sim::RoomSpec room;
  std::map<std::string, sim::SourceSpec> sources;
  std::vector<sim::ReceiverSpec> receivers;
  design::TargetSpec target;
  design::DesignConfig design;
  VelvetConfig velvet;
  std::map<std::string, ChannelSpec> channels;

  // Midpoint of the first two receivers; distances to the speakers are
  // measured from here.
  std::array<double, 3> listening_point() const;

  // Spacing between the first two receivers.
  double receiver_spacing_m() const;

  // Geometry of one channel, with speaker distances taken from the sources
  // map and the room's speed of sound.
  render::SystemLayout layout_for(const std::string& channel) const;

  // Full structural validation; throws ConfigError naming the field.
  void validate() const;

  friend bool operator==(const ProjectConfig&, const ProjectConfig&) = default;
};

// Stereo room with two-way primaries aimed at the listening position and
// omni supporting speakers behind the listener.
ProjectConfig default_config();

ProjectConfig parse_config(const std::string& text);
ProjectConfig load_config(const std::filesystem::path& path);

// Deterministic emitter: fixed key order, alphabetical maps, doubles with 17
// significant digits so parse(serialize(c)) == c exactly.
std::string serialize_config(const ProjectConfig& config);
void save_config(const std::filesystem::path& path,
                 const ProjectConfig& config);

}  // namespace roomcomp::config
