// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/sim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cdlab/tensor.hpp"

namespace cdlab::sim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ContractError("scenario: " + msg);
}

}  // namespace

void PathParams::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw ContractError("path direction is not a unit vector");
  if (!(delay >= 0.0)) throw ContractError("path delay must be nonnegative");
}

void MotionConfig::validate() const {
  require(slot_seconds > 0.0, "slot_seconds must be positive");
  require(speed_min >= 0.0 && speed_max >= speed_min, "speed band must satisfy 0 <= speed_min <= speed_max");
  require(quasi_static_step >= 0.0, "quasi_static_step must be nonnegative");
  require(turn_probability >= 0.0 && turn_probability <= 1.0, "turn_probability must lie in [0, 1]");
  require(turn_max_rad >= 0.0, "turn_max_rad must be nonnegative");
}

void ScenarioConfig::validate() const {
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(bandwidth_hz >= 0.0 && bandwidth_hz < 2.0 * carrier_hz, "bandwidth_hz out of range");
  require(num_subcarriers >= 1, "num_subcarriers must be at least 1");
  require(num_subcarriers == 1 || bandwidth_hz > 0.0, "more than one subcarrier needs a positive bandwidth");
  require(antenna_count() >= 1, "array needs at least one antenna");
  require(antenna_spacing >= 0.0, "antenna_spacing must be nonnegative");
  require(num_paths >= 1, "num_paths must be at least 1");
  require(speed_of_light > 0.0, "speed_of_light must be positive");
  require(ring_radius >= 0.0, "ring_radius must be nonnegative");
  require(scatterer_z_max >= scatterer_z_min, "scatterer height range is empty");
  require(path_gain > 0.0, "path_gain must be positive");
  require(scatter_gain_min >= 0.0 && scatter_gain_max >= scatter_gain_min, "scatter gain range is invalid");
  require(!train_region.degenerate(), "train region is degenerate");
  require(!test_region.degenerate(), "test region is degenerate");
  require(!train_region.overlaps(test_region), "train and test regions overlap");
  motion.validate();
}

void parse_value(std::string_view text, ArrayLayout& out) { out = parse_array_layout(text); }
std::string format_value(ArrayLayout v) { return std::string(to_string(v)); }

std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, std::size_t count) {
  if (count == 0) throw ContractError("subcarrier_frequencies: zero subcarriers");
  if (count == 1) return {carrier_hz};
  std::vector<double> f(count);
  const double step = bandwidth_hz / static_cast<double>(count - 1);
  for (std::size_t m = 0; m < count; ++m) f[m] = carrier_hz - 0.5 * bandwidth_hz + static_cast<double>(m) * step;
  return f;
}

std::vector<double> subcarrier_frequencies(const ScenarioConfig& cfg) {
  return subcarrier_frequencies(cfg.carrier_hz, cfg.bandwidth_hz, cfg.num_subcarriers);
}

ArrayGeometry make_array(const ScenarioConfig& cfg) {
  const double spacing = cfg.antenna_spacing > 0.0 ? cfg.antenna_spacing : 0.5 * cfg.wavelength();
  if (cfg.array_layout == ArrayLayout::planar) return ArrayGeometry::planar(cfg.planar_rows, cfg.planar_cols, spacing);
  return ArrayGeometry::linear(cfg.num_antennas, spacing);
}

std::vector<cplx> array_response(const ArrayGeometry& geometry, const Vec3& direction, double f, double c) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw ContractError("array_response: direction is not a unit vector");
  std::vector<cplx> a(geometry.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::polar(1.0, -kTwoPi * f * geometry.displacements[i].dot(direction) / c);
  }
  return a;
}

std::vector<cplx> channel_at_frequency(std::span<const PathParams> paths, const ArrayGeometry& geometry, double f,
                                       double c) {
  std::vector<cplx> h(geometry.size());
  for (const auto& p : paths) {
    const cplx g = p.amplitude * std::polar(1.0, -kTwoPi * f * p.delay);
    const auto a = array_response(geometry, p.direction, f, c);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += g * a[i];
  }
  return h;
}

CMatrix assemble_channel(std::span<const PathParams> paths, const ArrayGeometry& geometry,
                         std::span<const double> freqs, double c) {
  CMatrix H(geometry.size(), freqs.size());
  for (std::size_t m = 0; m < freqs.size(); ++m) {
    const auto h = channel_at_frequency(paths, geometry, freqs[m], c);
    for (std::size_t i = 0; i < h.size(); ++i) H(i, m) = h[i];
  }
  return H;
}

}  // namespace cdlab::sim
