// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cdlab/cmatrix.hpp"
#include "cdlab/sim/geometry.hpp"

namespace cdlab::sim {

inline constexpr double kSpeedOfLight = 299792458.0;

struct PathParams {
  cplx amplitude;
  double delay = 0.0;  // seconds
  Vec3 direction;      // unit vector, BS toward the departing ray

  void validate() const;
};

struct MotionConfig {
  double slot_seconds = 1e-3;
  double speed_min = 10.0;  // m/s
  double speed_max = 30.0;
  double quasi_static_step = 0.01;  // max per-slot displacement, m
  double turn_probability = 0.1;    // per slot
  double turn_max_rad = 0.7853981633974483;

  template <class V>
  void visit(V& v) {
    v("slot_seconds", slot_seconds);
    v("speed_min", speed_min);
    v("speed_max", speed_max);
    v("quasi_static_step", quasi_static_step);
    v("turn_probability", turn_probability);
    v("turn_max_rad", turn_max_rad);
  }

  void validate() const;
};

struct ScenarioConfig {
  double carrier_hz = 3.5e9;
  double bandwidth_hz = 40e6;
  std::size_t num_subcarriers = 32;

  ArrayLayout array_layout = ArrayLayout::linear;
  std::size_t num_antennas = 32;
  std::size_t planar_rows = 8;
  std::size_t planar_cols = 4;
  double antenna_spacing = 0.0;  // m; 0 means half a carrier wavelength

  std::size_t num_paths = 25;
  double speed_of_light = kSpeedOfLight;

  Vec3 bs_position{0.0, 0.0, 10.0};
  double user_height = 1.5;

  double ring_center_x = 0.0;
  double ring_center_y = 0.0;
  double ring_radius = 90.0;
  double scatterer_z_min = 0.0;
  double scatterer_z_max = 20.0;
  double path_gain = 50.0;
  double scatter_gain_min = 0.3;
  double scatter_gain_max = 1.0;

  // Opposite sides of the array axis: same angle and delay ranges, no shared area.
  Region train_region{40.0, 70.0, -20.0, 20.0};
  Region test_region{-70.0, -40.0, -20.0, 20.0};

  MotionConfig motion;

  std::size_t antenna_count() const {
    return array_layout == ArrayLayout::planar ? planar_rows * planar_cols : num_antennas;
  }
  double wavelength() const { return speed_of_light / carrier_hz; }

  template <class V>
  void visit(V& v) {
    v("carrier_hz", carrier_hz);
    v("bandwidth_hz", bandwidth_hz);
    v("num_subcarriers", num_subcarriers);
    v("array_layout", array_layout);
    v("num_antennas", num_antennas);
    v("planar_rows", planar_rows);
    v("planar_cols", planar_cols);
    v("antenna_spacing", antenna_spacing);
    v("num_paths", num_paths);
    v("speed_of_light", speed_of_light);
    v("bs_x", bs_position.x);
    v("bs_y", bs_position.y);
    v("bs_z", bs_position.z);
    v("user_height", user_height);
    v("ring_center_x", ring_center_x);
    v("ring_center_y", ring_center_y);
    v("ring_radius", ring_radius);
    v("scatterer_z_min", scatterer_z_min);
    v("scatterer_z_max", scatterer_z_max);
    v("path_gain", path_gain);
    v("scatter_gain_min", scatter_gain_min);
    v("scatter_gain_max", scatter_gain_max);
    v("train_x_min", train_region.x_min);
    v("train_x_max", train_region.x_max);
    v("train_y_min", train_region.y_min);
    v("train_y_max", train_region.y_max);
    v("test_x_min", test_region.x_min);
    v("test_x_max", test_region.x_max);
    v("test_y_min", test_region.y_min);
    v("test_y_max", test_region.y_max);
    motion.visit(v);
  }

  /// Throws ContractError on any inconsistent field, including
  /// overlapping train/test regions.
  void validate() const;
};

void parse_value(std::string_view text, ArrayLayout& out);
std::string format_value(ArrayLayout v);

/// f_m = f_c - B/2 + m * B / (N_c - 1), m = 0..N_c-1; f_c alone when N_c = 1.
std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, std::size_t count);
std::vector<double> subcarrier_frequencies(const ScenarioConfig& cfg);

ArrayGeometry make_array(const ScenarioConfig& cfg);

/// a_i = exp(-j 2 pi f (d_i . p) / c). Throws if |p| deviates from 1 by more than 1e-9.
std::vector<cplx> array_response(const ArrayGeometry& geometry, const Vec3& direction, double f,
                                 double c = kSpeedOfLight);

/// h(f) = sum_p alpha_p exp(-j 2 pi f tau_p) a(p).
std::vector<cplx> channel_at_frequency(std::span<const PathParams> paths, const ArrayGeometry& geometry, double f,
                                       double c = kSpeedOfLight);

/// N_t x N_c matrix whose column m is channel_at_frequency at freqs[m].
CMatrix assemble_channel(std::span<const PathParams> paths, const ArrayGeometry& geometry,
                         std::span<const double> freqs, double c = kSpeedOfLight);

}  // namespace cdlab::sim
