// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/sim/geometry.hpp"

#include <string>

#include "cdlab/tensor.hpp"

namespace cdlab::sim {

std::string_view to_string(ArrayLayout layout) { return layout == ArrayLayout::linear ? "linear" : "planar"; }

ArrayLayout parse_array_layout(std::string_view text) {
  if (text == "linear" || text == "ula") return ArrayLayout::linear;
  if (text == "planar" || text == "upa") return ArrayLayout::planar;
  throw ContractError("array layout must be linear or planar, got '" + std::string(text) + "'");
}

ArrayGeometry ArrayGeometry::linear(std::size_t count, double spacing, Vec3 axis) {
  if (count == 0) throw ContractError("linear array: zero elements");
  ArrayGeometry g;
  g.layout = ArrayLayout::linear;
  const Vec3 u = axis.unit();
  for (std::size_t i = 0; i < count; ++i) g.displacements.push_back(u * (spacing * static_cast<double>(i)));
  return g;
}

ArrayGeometry ArrayGeometry::planar(std::size_t rows, std::size_t cols, double spacing, Vec3 row_axis,
                                    Vec3 col_axis) {
  if (rows == 0 || cols == 0) throw ContractError("planar array: zero elements");
  ArrayGeometry g;
  g.layout = ArrayLayout::planar;
  const Vec3 ur = row_axis.unit();
  const Vec3 uc = col_axis.unit();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      g.displacements.push_back(ur * (spacing * static_cast<double>(r)) + uc * (spacing * static_cast<double>(c)));
    }
  }
  return g;
}

void ArrayGeometry::validate() const {
  if (displacements.empty()) throw ContractError("array geometry: no elements");
  if (!(displacements.front() == Vec3{})) throw ContractError("array geometry: first displacement must be zero");
}

}  // namespace cdlab::sim
