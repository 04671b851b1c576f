// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

namespace cdlab::sim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 unit() const { return *this * (1.0 / norm()); }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class ArrayLayout { linear, planar };

std::string_view to_string(ArrayLayout layout);
ArrayLayout parse_array_layout(std::string_view text);

/// Antenna positions relative to the first element, in meters.
struct ArrayGeometry {
  ArrayLayout layout = ArrayLayout::linear;
  std::vector<Vec3> displacements;

  std::size_t size() const { return displacements.size(); }

  /// Uniform linear array of `count` elements along `axis` (unit vector).
  static ArrayGeometry linear(std::size_t count, double spacing, Vec3 axis = {0.0, 1.0, 0.0});
  /// rows x cols planar array in the plane spanned by `row_axis` and `col_axis`.
  /// Element index = r * cols + c.
  static ArrayGeometry planar(std::size_t rows, std::size_t cols, double spacing,
                              Vec3 row_axis = {0.0, 0.0, 1.0}, Vec3 col_axis = {0.0, 1.0, 0.0});

  /// Throws ContractError unless non-empty with a zero first displacement.
  void validate() const;
};

/// Axis-aligned rectangle of user positions on the ground plane.
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool degenerate() const { return !(x_max > x_min) || !(y_max > y_min); }
  bool contains(const Vec3& p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
  bool overlaps(const Region& o) const {
    return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max && o.y_min <= y_max;
  }
  Vec3 center(double z) const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max), z}; }
};

}  // namespace cdlab::sim
