// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace roomcomp::config {

namespace {

constexpr std::array<const char*, 6> kSurfaceNames = {"x0", "x1", "y0",
                                                      "y1", "z0", "z1"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Shortest decimal form that parses back to the identical double.
std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- parsing helpers -------------------------------------------------------

void check_keys(const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(join(path, key), "unknown key");
  }
}

YAML::Node need(const YAML::Node& node, const std::string& path,
                const std::string& key) {
  const YAML::Node child = node[key];
  if (!child) fail(join(path, key), "missing");
  return child;
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number");
  }
}

int as_int(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected an integer");
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    fail(path, "expected an integer");
  }
}

std::size_t as_size(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a non-negative integer");
  try {
    return n.as<std::size_t>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a non-negative integer");
  }
}

std::uint64_t as_u64(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a non-negative integer");
  try {
    return n.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a non-negative integer");
  }
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a string");
  return n.as<std::string>();
}

std::array<double, 3> as_vec3(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 3) fail(path, "expected 3 numbers");
  return {as_double(n[0], path), as_double(n[1], path), as_double(n[2], path)};
}

std::array<double, 6> as_bands(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 6) {
    fail(path, "expected 6 numbers (one per octave band)");
  }
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = as_double(n[i], path);
  return out;
}

std::pair<double, double> as_band_pair(const YAML::Node& n,
                                       const std::string& path) {
  if (!n.IsSequence() || n.size() != 2) fail(path, "expected [low_hz, high_hz]");
  return {as_double(n[0], path), as_double(n[1], path)};
}

sim::Directivity parse_directivity(const YAML::Node& n,
                                   const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path,
             {"kind", "transition_low_hz", "transition_high_hz",
              "rear_attenuation_db"});
  sim::Directivity d;
  const std::string kind = as_string(need(n, path, "kind"), join(path, "kind"));
  if (kind == "omni") {
    d.kind = sim::DirectivityKind::omni;
  } else if (kind == "two_way") {
    d.kind = sim::DirectivityKind::two_way;
  } else {
    fail(join(path, "kind"), "expected omni or two_way, got '" + kind + "'");
  }
  if (n["transition_low_hz"]) {
    d.transition_low_hz =
        as_double(n["transition_low_hz"], join(path, "transition_low_hz"));
  }
  if (n["transition_high_hz"]) {
    d.transition_high_hz =
        as_double(n["transition_high_hz"], join(path, "transition_high_hz"));
  }
  if (n["rear_attenuation_db"]) {
    d.rear_attenuation_db =
        as_double(n["rear_attenuation_db"], join(path, "rear_attenuation_db"));
  }
  return d;
}

sim::SourceSpec parse_source(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path, {"position_m", "aim_azimuth_deg", "directivity"});
  sim::SourceSpec s;
  s.position_m = as_vec3(need(n, path, "position_m"), join(path, "position_m"));
  if (n["aim_azimuth_deg"]) {
    s.aim_azimuth_deg =
        as_double(n["aim_azimuth_deg"], join(path, "aim_azimuth_deg"));
  }
  if (n["directivity"]) {
    s.directivity = parse_directivity(n["directivity"], join(path, "directivity"));
  }
  return s;
}

sim::RoomSpec parse_room(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path,
             {"dimensions_m", "speed_of_sound_m_s", "max_reflection_time_s",
              "absorption"});
  sim::RoomSpec room;
  room.dimensions_m =
      as_vec3(need(n, path, "dimensions_m"), join(path, "dimensions_m"));
  if (n["speed_of_sound_m_s"]) {
    room.speed_of_sound_m_s =
        as_double(n["speed_of_sound_m_s"], join(path, "speed_of_sound_m_s"));
  }
  if (n["max_reflection_time_s"]) {
    room.max_reflection_time_s = as_double(n["max_reflection_time_s"],
                                           join(path, "max_reflection_time_s"));
  }
  const YAML::Node ab = need(n, path, "absorption");
  const std::string ab_path = join(path, "absorption");
  if (!ab.IsMap()) fail(ab_path, "expected a key/value block");
  check_keys(ab, ab_path,
             {kSurfaceNames[0], kSurfaceNames[1], kSurfaceNames[2],
              kSurfaceNames[3], kSurfaceNames[4], kSurfaceNames[5]});
  for (std::size_t i = 0; i < kSurfaceNames.size(); ++i) {
    room.absorption[i] = as_bands(need(ab, ab_path, kSurfaceNames[i]),
                                  join(ab_path, kSurfaceNames[i]));
  }
  return room;
}

design::TargetSpec parse_target(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path,
             {"mode", "sloped_total_drop_db", "sloped_f_lo_hz",
              "sloped_f_hi_hz", "compensation_band_hz", "equal_deficit_band_hz",
              "precedence_thresholds"});
  design::TargetSpec t;
  if (n["mode"]) {
    const std::string mode = as_string(n["mode"], join(path, "mode"));
    if (mode == "flat") {
      t.mode = design::TargetMode::flat;
    } else if (mode == "sloped") {
      t.mode = design::TargetMode::sloped;
    } else {
      fail(join(path, "mode"), "expected flat or sloped, got '" + mode + "'");
    }
  }
  if (n["sloped_total_drop_db"]) {
    t.sloped_total_drop_db =
        as_double(n["sloped_total_drop_db"], join(path, "sloped_total_drop_db"));
  }
  if (n["sloped_f_lo_hz"]) {
    t.sloped_f_lo_hz = as_double(n["sloped_f_lo_hz"], join(path, "sloped_f_lo_hz"));
  }
  if (n["sloped_f_hi_hz"]) {
    t.sloped_f_hi_hz = as_double(n["sloped_f_hi_hz"], join(path, "sloped_f_hi_hz"));
  }
  if (n["compensation_band_hz"]) {
    t.compensation_band_hz = as_band_pair(n["compensation_band_hz"],
                                          join(path, "compensation_band_hz"));
  }
  if (n["equal_deficit_band_hz"]) {
    t.equal_deficit_band_hz = as_band_pair(n["equal_deficit_band_hz"],
                                           join(path, "equal_deficit_band_hz"));
  }
  if (n["precedence_thresholds"]) {
    const YAML::Node seq = n["precedence_thresholds"];
    const std::string seq_path = join(path, "precedence_thresholds");
    if (!seq.IsSequence()) fail(seq_path, "expected a list of bands");
    t.precedence_thresholds.clear();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::string row_path = seq_path + "[" + std::to_string(i) + "]";
      const YAML::Node row = seq[i];
      if (!row.IsMap()) fail(row_path, "expected a key/value block");
      check_keys(row, row_path, {"f_lo_hz", "f_hi_hz", "threshold_db"});
      design::ThresholdBand band;
      band.f_lo_hz = as_double(need(row, row_path, "f_lo_hz"),
                               join(row_path, "f_lo_hz"));
      band.f_hi_hz = as_double(need(row, row_path, "f_hi_hz"),
                               join(row_path, "f_hi_hz"));
      band.threshold_db = as_double(need(row, row_path, "threshold_db"),
                                    join(row_path, "threshold_db"));
      t.precedence_thresholds.push_back(band);
    }
  }
  return t;
}

design::DesignConfig parse_design(const YAML::Node& n, const std::string& path,
                                  int sample_rate_hz) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path,
             {"n_taps", "n_fft", "smoothing_fraction", "delay_s",
              "beta_in_band", "beta_out_band", "band_edge_transition_octaves"});
  design::DesignConfig d;
  if (n["n_taps"]) d.n_taps = as_size(n["n_taps"], join(path, "n_taps"));
  if (n["n_fft"]) d.n_fft = as_size(n["n_fft"], join(path, "n_fft"));
  if (n["smoothing_fraction"]) {
    d.smoothing_fraction =
        as_double(n["smoothing_fraction"], join(path, "smoothing_fraction"));
  }
  if (n["delay_s"]) d.delay_s = as_double(n["delay_s"], join(path, "delay_s"));
  if (n["beta_in_band"]) {
    d.beta_in_band = as_double(n["beta_in_band"], join(path, "beta_in_band"));
  }
  if (n["beta_out_band"]) {
    d.beta_out_band = as_double(n["beta_out_band"], join(path, "beta_out_band"));
  }
  if (n["band_edge_transition_octaves"]) {
    d.band_edge_transition_octaves =
        as_double(n["band_edge_transition_octaves"],
                  join(path, "band_edge_transition_octaves"));
  }
  d.sample_rate_hz = sample_rate_hz;
  return d;
}

VelvetConfig parse_velvet(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path, {"duration_s", "density_pulses_per_s"});
  VelvetConfig v;
  if (n["duration_s"]) {
    v.duration_s = as_double(n["duration_s"], join(path, "duration_s"));
  }
  if (n["density_pulses_per_s"]) {
    v.density_pulses_per_s = as_double(n["density_pulses_per_s"],
                                       join(path, "density_pulses_per_s"));
  }
  return v;
}

ChannelSpec parse_channel(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, "expected a key/value block");
  check_keys(n, path,
             {"primary_source", "supporting_source", "precedence_delay_s"});
  ChannelSpec ch;
  ch.primary_source = as_string(need(n, path, "primary_source"),
                                join(path, "primary_source"));
  ch.supporting_source = as_string(need(n, path, "supporting_source"),
                                   join(path, "supporting_source"));
  if (n["precedence_delay_s"]) {
    ch.precedence_delay_s =
        as_double(n["precedence_delay_s"], join(path, "precedence_delay_s"));
  }
  return ch;
}

bool name_is_safe(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

// ---- emitter helpers -------------------------------------------------------

std::string vec_text(const std::array<double, 3>& v) {
  return "[" + fmt_double(v[0]) + ", " + fmt_double(v[1]) + ", " +
         fmt_double(v[2]) + "]";
}

std::string bands_text(const std::array<double, 6>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out + "]";
}

std::string pair_text(const std::pair<double, double>& p) {
  return "[" + fmt_double(p.first) + ", " + fmt_double(p.second) + "]";
}

}  // namespace

std::array<double, 3> ProjectConfig::listening_point() const {
  if (receivers.size() < 2) {
    throw ConfigError("receivers: at least two receivers required");
  }
  std::array<double, 3> mid{};
  for (int a = 0; a < 3; ++a) {
    mid[a] = 0.5 * (receivers[0].position_m[a] + receivers[1].position_m[a]);
  }
  return mid;
}

double ProjectConfig::receiver_spacing_m() const {
  if (receivers.size() < 2) {
    throw ConfigError("receivers: at least two receivers required");
  }
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = receivers[0].position_m[a] - receivers[1].position_m[a];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

render::SystemLayout ProjectConfig::layout_for(const std::string& channel) const {
  const auto it = channels.find(channel);
  if (it == channels.end()) fail("channels." + channel, "unknown channel");
  const std::array<double, 3> lp = listening_point();
  const auto distance_to = [&](const std::string& source_name,
                               const std::string& field) {
    const auto src = sources.find(source_name);
    if (src == sources.end()) {
      fail("channels." + channel + "." + field,
           "unknown source '" + source_name + "'");
    }
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = src->second.position_m[a] - lp[a];
      d2 += d * d;
    }
    return std::sqrt(d2);
  };
  render::SystemLayout layout;
  layout.primary_distance_m =
      distance_to(it->second.primary_source, "primary_source");
  layout.supporting_distance_m =
      distance_to(it->second.supporting_source, "supporting_source");
  layout.speed_of_sound_m_s = room.speed_of_sound_m_s;
  layout.precedence_delay_s = it->second.precedence_delay_s;
  return layout;
}

void ProjectConfig::validate() const {
  if (schema_version != 1) {
    fail("schema_version", "unsupported value (expected 1)");
  }
  if (sample_rate_hz <= 0) fail("sample_rate_hz", "must be positive");
  try {
    room.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("room: ") + e.what());
  }
  const auto inside = [&](const std::array<double, 3>& p) {
    for (int a = 0; a < 3; ++a) {
      if (!(p[a] > 0.0) || !(p[a] < room.dimensions_m[a])) return false;
    }
    return true;
  };
  if (sources.empty()) fail("sources", "at least one source required");
  for (const auto& [name, src] : sources) {
    const std::string path = "sources." + name;
    if (!name_is_safe(name)) {
      fail("sources", "name '" + name + "' contains unsupported characters");
    }
    if (!inside(src.position_m)) {
      fail(path + ".position_m", "outside room dimensions");
    }
    const auto& dir = src.directivity;
    if (!(dir.transition_low_hz > 0.0) ||
        !(dir.transition_low_hz < dir.transition_high_hz)) {
      fail(path + ".directivity",
           "transition frequencies must be positive and ascending");
    }
    if (!(dir.rear_attenuation_db > 0.0)) {
      fail(path + ".directivity.rear_attenuation_db", "must be positive");
    }
  }
  if (receivers.size() < 2) fail("receivers", "at least two receivers required");
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    if (!inside(receivers[i].position_m)) {
      fail("receivers[" + std::to_string(i) + "].position_m",
           "outside room dimensions");
    }
  }
  if (receivers[0].position_m == receivers[1].position_m) {
    fail("receivers", "first two receivers coincide");
  }
  try {
    target.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("target: ") + e.what());
  }
  try {
    design.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("design: ") + e.what());
  }
  if (design.sample_rate_hz != sample_rate_hz) {
    fail("design.sample_rate_hz", "must match the top-level sample_rate_hz");
  }
  if (!(velvet.duration_s > 0.0)) fail("velvet.duration_s", "must be positive");
  if (!(velvet.density_pulses_per_s > 0.0)) {
    fail("velvet.density_pulses_per_s", "must be positive");
  }
  if (velvet.density_pulses_per_s > sample_rate_hz) {
    fail("velvet.density_pulses_per_s", "exceeds sample rate");
  }
  if (channels.empty()) fail("channels", "at least one channel required");
  for (const auto& [name, ch] : channels) {
    const std::string path = "channels." + name;
    if (!name_is_safe(name)) {
      fail("channels", "name '" + name + "' contains unsupported characters");
    }
    if (!sources.count(ch.primary_source)) {
      fail(path + ".primary_source",
           "unknown source '" + ch.primary_source + "'");
    }
    if (!sources.count(ch.supporting_source)) {
      fail(path + ".supporting_source",
           "unknown source '" + ch.supporting_source + "'");
    }
    if (ch.primary_source == ch.supporting_source) {
      fail(path, "primary and supporting source must differ");
    }
    if (!(ch.precedence_delay_s >= 0.002) || !(ch.precedence_delay_s <= 0.050)) {
      fail(path + ".precedence_delay_s", "must lie in [0.002, 0.05] s");
    }
  }
}

ProjectConfig default_config() {
  ProjectConfig c;
  c.room.dimensions_m = {7.4, 4.6, 2.6};
  // Lightly damped at low frequencies, progressively more absorptive above:
  // an untreated living-room profile with a pronounced low-frequency
  // reverberant build-up for the compensation stages to work against.
  for (auto& surface : c.room.absorption) {
    surface = {0.06, 0.08, 0.12, 0.20, 0.32, 0.45};
  }
  c.room.speed_of_sound_m_s = 343.0;
  c.room.max_reflection_time_s = 0.7;

  c.receivers = {{{3.7, 2.215, 1.2}}, {{3.7, 2.385, 1.2}}};
  const std::array<double, 3> lp = c.listening_point();
  const auto aim_at_listener = [&lp](const std::array<double, 3>& pos) {
    return std::atan2(lp[1] - pos[1], lp[0] - pos[0]) * 180.0 /
           std::numbers::pi;
  };

  sim::Directivity two_way;
  two_way.kind = sim::DirectivityKind::two_way;

  sim::SourceSpec primary_left;
  primary_left.position_m = {1.2, 1.1, 1.2};
  primary_left.aim_azimuth_deg = aim_at_listener(primary_left.position_m);
  primary_left.directivity = two_way;

  sim::SourceSpec primary_right;
  primary_right.position_m = {1.2, 3.5, 1.2};
  primary_right.aim_azimuth_deg = aim_at_listener(primary_right.position_m);
  primary_right.directivity = two_way;

  sim::SourceSpec supporting_left;
  supporting_left.position_m = {5.9, 1.3, 1.2};

  sim::SourceSpec supporting_right;
  supporting_right.position_m = {5.9, 3.3, 1.2};

  c.sources = {{"primary_left", primary_left},
               {"primary_right", primary_right},
               {"supporting_left", supporting_left},
               {"supporting_right", supporting_right}};

  c.channels = {{"left", {"primary_left", "supporting_left", 0.010}},
                {"right", {"primary_right", "supporting_right", 0.010}}};
  return c;
}

ProjectConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: expected a key/value document");
  check_keys(root, "",
             {"schema_version", "sample_rate_hz", "seed", "room", "sources",
              "receivers", "target", "design", "velvet", "channels"});

  ProjectConfig c;
  c.schema_version =
      as_int(need(root, "", "schema_version"), "schema_version");
  c.sample_rate_hz =
      as_int(need(root, "", "sample_rate_hz"), "sample_rate_hz");
  if (root["seed"]) c.seed = as_u64(root["seed"], "seed");
  c.room = parse_room(need(root, "", "room"), "room");

  const YAML::Node sources = need(root, "", "sources");
  if (!sources.IsMap()) fail("sources", "expected a map of named sources");
  for (const auto& kv : sources) {
    const std::string name = kv.first.as<std::string>();
    c.sources[name] = parse_source(kv.second, "sources." + name);
  }

  const YAML::Node receivers = need(root, "", "receivers");
  if (!receivers.IsSequence()) fail("receivers", "expected a list");
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    const std::string path = "receivers[" + std::to_string(i) + "]";
    const YAML::Node row = receivers[i];
    if (!row.IsMap()) fail(path, "expected a key/value block");
    check_keys(row, path, {"position_m"});
    sim::ReceiverSpec rcv;
    rcv.position_m =
        as_vec3(need(row, path, "position_m"), join(path, "position_m"));
    c.receivers.push_back(rcv);
  }

  if (root["target"]) c.target = parse_target(root["target"], "target");
  if (root["design"]) {
    c.design = parse_design(root["design"], "design", c.sample_rate_hz);
  } else {
    c.design.sample_rate_hz = c.sample_rate_hz;
  }
  if (root["velvet"]) c.velvet = parse_velvet(root["velvet"], "velvet");

  const YAML::Node channels = need(root, "", "channels");
  if (!channels.IsMap()) fail("channels", "expected a map of named channels");
  for (const auto& kv : channels) {
    const std::string name = kv.first.as<std::string>();
    c.channels[name] = parse_channel(kv.second, "channels." + name);
  }

  c.validate();
  return c;
}

ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ProjectConfig& c) {
  std::ostringstream o;
  o << "schema_version: " << c.schema_version << "\n";
  o << "sample_rate_hz: " << c.sample_rate_hz << "\n";
  o << "seed: " << c.seed << "\n";
  o << "room:\n";
  o << "  dimensions_m: " << vec_text(c.room.dimensions_m) << "\n";
  o << "  speed_of_sound_m_s: " << fmt_double(c.room.speed_of_sound_m_s)
    << "\n";
  o << "  max_reflection_time_s: " << fmt_double(c.room.max_reflection_time_s)
    << "\n";
  o << "  absorption:\n";
  for (std::size_t i = 0; i < kSurfaceNames.size(); ++i) {
    o << "    " << kSurfaceNames[i] << ": " << bands_text(c.room.absorption[i])
      << "\n";
  }
  o << "sources:\n";
  for (const auto& [name, src] : c.sources) {
    o << "  " << name << ":\n";
    o << "    position_m: " << vec_text(src.position_m) << "\n";
    o << "    aim_azimuth_deg: " << fmt_double(src.aim_azimuth_deg) << "\n";
    o << "    directivity:\n";
    o << "      kind: "
      << (src.directivity.kind == sim::DirectivityKind::omni ? "omni"
                                                             : "two_way")
      << "\n";
    o << "      transition_low_hz: "
      << fmt_double(src.directivity.transition_low_hz) << "\n";
    o << "      transition_high_hz: "
      << fmt_double(src.directivity.transition_high_hz) << "\n";
    o << "      rear_attenuation_db: "
      << fmt_double(src.directivity.rear_attenuation_db) << "\n";
  }
  o << "receivers:\n";
  for (const auto& rcv : c.receivers) {
    o << "  - position_m: " << vec_text(rcv.position_m) << "\n";
  }
  o << "target:\n";
  o << "  mode: "
    << (c.target.mode == design::TargetMode::flat ? "flat" : "sloped") << "\n";
  o << "  sloped_total_drop_db: " << fmt_double(c.target.sloped_total_drop_db)
    << "\n";
  o << "  sloped_f_lo_hz: " << fmt_double(c.target.sloped_f_lo_hz) << "\n";
  o << "  sloped_f_hi_hz: " << fmt_double(c.target.sloped_f_hi_hz) << "\n";
  o << "  compensation_band_hz: " << pair_text(c.target.compensation_band_hz)
    << "\n";
  o << "  equal_deficit_band_hz: " << pair_text(c.target.equal_deficit_band_hz)
    << "\n";
  o << "  precedence_thresholds:\n";
  for (const auto& band : c.target.precedence_thresholds) {
    o << "    - {f_lo_hz: " << fmt_double(band.f_lo_hz)
      << ", f_hi_hz: " << fmt_double(band.f_hi_hz)
      << ", threshold_db: " << fmt_double(band.threshold_db) << "}\n";
  }
  o << "design:\n";
  o << "  n_taps: " << c.design.n_taps << "\n";
  o << "  n_fft: " << c.design.n_fft << "\n";
  o << "  smoothing_fraction: " << fmt_double(c.design.smoothing_fraction)
    << "\n";
  o << "  delay_s: " << fmt_double(c.design.delay_s) << "\n";
  o << "  beta_in_band: " << fmt_double(c.design.beta_in_band) << "\n";
  o << "  beta_out_band: " << fmt_double(c.design.beta_out_band) << "\n";
  o << "  band_edge_transition_octaves: "
    << fmt_double(c.design.band_edge_transition_octaves) << "\n";
  o << "velvet:\n";
  o << "  duration_s: " << fmt_double(c.velvet.duration_s) << "\n";
  o << "  density_pulses_per_s: " << fmt_double(c.velvet.density_pulses_per_s)
    << "\n";
  o << "channels:\n";
  for (const auto& [name, ch] : c.channels) {
    o << "  " << name << ":\n";
    o << "    primary_source: " << ch.primary_source << "\n";
    o << "    supporting_source: " << ch.supporting_source << "\n";
    o << "    precedence_delay_s: " << fmt_double(ch.precedence_delay_s)
      << "\n";
  }
  return o.str();
}

void save_config(const std::filesystem::path& path,
                 const ProjectConfig& config) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << serialize_config(config);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace roomcomp::config
