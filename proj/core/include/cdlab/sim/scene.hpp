// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/sim/channel.hpp"

namespace cdlab::sim {

struct Scatterer {
  Vec3 position;
  double gain = 1.0;   // relative to the line-of-sight gain
  double phase = 0.0;  // radians, fixed for the scene
};

/// One base station plus a fixed set of single-bounce scatterers.
struct Scene {
  Vec3 bs;
  double path_gain = 1.0;
  double los_phase = 0.0;
  std::vector<Scatterer> scatterers;  // num_paths - 1 entries
  std::uint64_t seed = 0;
};

/// Scatterers are placed on a ring around (ring_center_x, ring_center_y)
/// at uniform random azimuth and height.
Scene make_scene(const ScenarioConfig& cfg, std::uint64_t seed);

/// Exactly 1 + scatterers.size() paths: line of sight first, then one per
/// scatterer. Amplitude is path_gain * gain * e^{j phase} / path_length.
std::vector<PathParams> scene_to_paths(const Scene& scene, const Vec3& user, double c = kSpeedOfLight);
std::vector<PathParams> scene_to_paths(const Vec3& user, const ScenarioConfig& cfg, std::uint64_t seed);

enum class Mobility : std::uint32_t { mobile = 0, quasi_static = 1 };

std::string_view to_string(Mobility m);
Mobility parse_mobility(std::string_view text);
void parse_value(std::string_view text, Mobility& out);
std::string format_value(Mobility m);

/// User positions at user_height inside `region`, one per slot.
///
/// mobile: speed drawn once from [speed_min, speed_max]; heading constant
/// except for random turns; a step leaving the region reflects the heading
/// component(s) that would cross the boundary, so every step has length
/// speed * slot_seconds.
/// quasi_static: uniform random direction, step length uniform in
/// [0, quasi_static_step].
std::vector<Vec3> generate_trajectory(Mobility kind, std::size_t num_slots, const Region& region,
                                      const MotionConfig& motion, double height, std::uint64_t seed);

}  // namespace cdlab::sim
