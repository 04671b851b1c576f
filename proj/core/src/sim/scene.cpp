// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/sim/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cdlab/rng.hpp"
#include "cdlab/tensor.hpp"

namespace cdlab::sim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Scene make_scene(const ScenarioConfig& cfg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "scatterers"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scene s;
  s.bs = cfg.bs_position;
  s.path_gain = cfg.path_gain;
  s.los_phase = kTwoPi * unit(rng);
  s.seed = seed;
  for (std::size_t p = 1; p < cfg.num_paths; ++p) {
    const double az = kTwoPi * unit(rng);
    Scatterer sc;
    sc.position = {cfg.ring_center_x + cfg.ring_radius * std::cos(az), cfg.ring_center_y + cfg.ring_radius * std::sin(az),
                   cfg.scatterer_z_min + (cfg.scatterer_z_max - cfg.scatterer_z_min) * unit(rng)};
    sc.gain = cfg.scatter_gain_min + (cfg.scatter_gain_max - cfg.scatter_gain_min) * unit(rng);
    sc.phase = kTwoPi * unit(rng);
    s.scatterers.push_back(sc);
  }
  return s;
}

std::vector<PathParams> scene_to_paths(const Scene& scene, const Vec3& user, double c) {
  std::vector<PathParams> paths;
  paths.reserve(scene.scatterers.size() + 1);
  const Vec3 los = user - scene.bs;
  const double d = los.norm();
  if (!(d > 0.0)) throw ContractError("scene_to_paths: user coincides with the base station");
  paths.push_back({std::polar(scene.path_gain / d, scene.los_phase), d / c, los.unit()});
  for (const auto& sc : scene.scatterers) {
    const Vec3 out = sc.position - scene.bs;
    const double len = out.norm() + (user - sc.position).norm();
    if (!(out.norm() > 0.0)) throw ContractError("scene_to_paths: scatterer coincides with the base station");
    paths.push_back({std::polar(scene.path_gain * sc.gain / len, sc.phase), len / c, out.unit()});
  }
  return paths;
}

std::vector<PathParams> scene_to_paths(const Vec3& user, const ScenarioConfig& cfg, std::uint64_t seed) {
  return scene_to_paths(make_scene(cfg, seed), user, cfg.speed_of_light);
}

std::string_view to_string(Mobility m) { return m == Mobility::mobile ? "mobile" : "quasi_static"; }

Mobility parse_mobility(std::string_view text) {
  if (text == "mobile") return Mobility::mobile;
  if (text == "quasi_static" || text == "quasi-static" || text == "static") return Mobility::quasi_static;
  throw ContractError("mobility must be mobile or quasi_static, got '" + std::string(text) + "'");
}

void parse_value(std::string_view text, Mobility& out) { out = parse_mobility(text); }
std::string format_value(Mobility m) { return std::string(to_string(m)); }

std::vector<Vec3> generate_trajectory(Mobility kind, std::size_t num_slots, const Region& region,
                                      const MotionConfig& motion, double height, std::uint64_t seed) {
  if (num_slots == 0) throw ContractError("generate_trajectory: num_slots must be at least 1");
  if (region.degenerate()) throw ContractError("generate_trajectory: degenerate region");
  motion.validate();

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double width = region.x_max - region.x_min;
  const double depth = region.y_max - region.y_min;

  std::vector<Vec3> pos;
  pos.reserve(num_slots);
  pos.push_back({region.x_min + width * unit(rng), region.y_min + depth * unit(rng), height});

  const double speed = motion.speed_min + (motion.speed_max - motion.speed_min) * unit(rng);
  double heading = kTwoPi * unit(rng);
  const double max_step = kind == Mobility::mobile ? speed * motion.slot_seconds : motion.quasi_static_step;
  if (max_step >= 0.5 * std::min(width, depth)) {
    throw ContractError("generate_trajectory: region too small for the per-slot displacement");
  }

  for (std::size_t t = 1; t < num_slots; ++t) {
    double step = max_step;
    if (kind == Mobility::mobile) {
      if (unit(rng) < motion.turn_probability) heading += motion.turn_max_rad * (2.0 * unit(rng) - 1.0);
    } else {
      heading = kTwoPi * unit(rng);
      step = max_step * unit(rng);
    }
    const Vec3& p = pos.back();
    double dx = step * std::cos(heading);
    double dy = step * std::sin(heading);
    // Reflect at the walls. Flipping a component keeps the step length.
    if (p.x + dx < region.x_min || p.x + dx > region.x_max) {
      dx = -dx;
      heading = std::numbers::pi - heading;
    }
    if (p.y + dy < region.y_min || p.y + dy > region.y_max) {
      dy = -dy;
      heading = -heading;
    }
    pos.push_back({p.x + dx, p.y + dy, height});
  }
  return pos;
}

}  // namespace cdlab::sim
