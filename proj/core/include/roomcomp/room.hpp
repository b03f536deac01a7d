// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>

#include "roomcomp/signal.hpp"

namespace roomcomp::sim {

/// Octave-band centers used for wall absorption and source directivity.
inline constexpr std::array<double, 6> kOctaveBandCentersHz = {
    125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0};

enum class DirectivityKind { omni, two_way };

/// Parametric loudspeaker radiation model: unity on axis at all frequencies;
/// off axis the gain crossfades (linearly in dB over log frequency) from
/// unity below transition_low_hz to a cardioid-shaped pattern floored at
/// -rear_attenuation_db above transition_high_hz.
struct Directivity {
  DirectivityKind kind = DirectivityKind::omni;
  double transition_low_hz = 500.0;
  double transition_high_hz = 4000.0;
  double rear_attenuation_db = 20.0;

  friend bool operator==(const Directivity&, const Directivity&) = default;
};

struct SourceSpec {
  std::array<double, 3> position_m{};
  double aim_azimuth_deg = 0.0;  // aim axis in the horizontal plane
  Directivity directivity{};

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct ReceiverSpec {
  std::array<double, 3> position_m{};

  friend bool operator==(const ReceiverSpec&, const ReceiverSpec&) = default;
};

/// Rectangular room. Surfaces are indexed x0, x1, y0, y1, z0, z1 (the wall
/// at coordinate 0 and at the room dimension, per axis); each surface has
/// one absorption coefficient per octave band.
struct RoomSpec {
  std::array<double, 3> dimensions_m{7.4, 4.6, 2.6};
  std::array<std::array<double, 6>, 6> absorption{};
  double speed_of_sound_m_s = 343.0;
  double max_reflection_time_s = 1.0;

  /// Throws std::invalid_argument on non-positive dimensions, absorption
  /// outside (0, 1], or non-positive speed of sound / reflection time.
  void validate() const;

  friend bool operator==(const RoomSpec&, const RoomSpec&) = default;
};

struct RirComponents {
  ImpulseResponse direct;
  ImpulseResponse reverberant;
};

/// Gain of a source toward a direction emission_angle_deg away from its aim
/// axis, at the given frequency.
double directivity_gain(const SourceSpec& src, double emission_angle_deg,
                        double frequency_hz);

/// Image-source simulation of the room response, split into the direct-path
/// pulse and everything reflected. Image pulses are band-shaped by the
/// per-surface absorption and the source directivity sampled at the octave
/// centers, and placed with a 32-tap windowed-sinc fractional delay.
RirComponents simulate_components(const RoomSpec& room, const SourceSpec& src,
                                  const ReceiverSpec& rcv, int sample_rate_hz);

/// Sample-wise sum of the two components from simulate_components.
ImpulseResponse simulate_rir(const RoomSpec& room, const SourceSpec& src,
                             const ReceiverSpec& rcv, int sample_rate_hz);

}  // namespace roomcomp::sim
