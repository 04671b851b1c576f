// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <vector>

#include "cdlab/cmatrix.hpp"

namespace cdlab::sim {

/// Regular pilot subset: antennas {0, l_t, ..., (N_t0 - 1) l_t} with
/// l_t = N_t / N_t0 (floor), subcarriers likewise.
struct PilotPattern {
  std::size_t num_antennas = 0;
  std::size_t num_subcarriers = 0;
  std::vector<std::size_t> antennas;
  std::vector<std::size_t> subcarriers;

  static PilotPattern make(std::size_t nt, std::size_t nc, std::size_t nt0, std::size_t nc0);

  std::size_t rows() const { return antennas.size(); }
  std::size_t cols() const { return subcarriers.size(); }

  void validate() const;
};

CMatrix extract_pilot(const CMatrix& H, const PilotPattern& omega);

/// Full-size matrix with the pilot entries placed at their indices, zero elsewhere.
CMatrix scatter_pilot(const CMatrix& pilot, const PilotPattern& omega);

struct DisturbanceSpec {
  double sigma = 0.0;
};

/// H (.) D with D_ij ~ N(1, sigma^2) real and independent.
CMatrix apply_disturbance(const CMatrix& H, const DisturbanceSpec& spec, std::uint64_t seed);

}  // namespace cdlab::sim
