// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/sim/pilot.hpp"

#include <string>

#include "cdlab/rng.hpp"
#include "cdlab/tensor.hpp"

namespace cdlab::sim {
namespace {

std::vector<std::size_t> strided(std::size_t n, std::size_t n0, const char* what) {
  if (n0 == 0 || n0 > n) {
    throw ContractError(std::string("pilot pattern: ") + what + " count " + std::to_string(n0) + " not in [1, " +
                        std::to_string(n) + "]");
  }
  const std::size_t l = n / n0;
  std::vector<std::size_t> idx(n0);
  for (std::size_t k = 0; k < n0; ++k) idx[k] = k * l;
  return idx;
}

void check_increasing(const std::vector<std::size_t>& idx, std::size_t bound, const char* what) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= bound || (k > 0 && idx[k] <= idx[k - 1])) {
      throw ContractError(std::string("pilot pattern: invalid ") + what + " index set");
    }
  }
}

}  // namespace

PilotPattern PilotPattern::make(std::size_t nt, std::size_t nc, std::size_t nt0, std::size_t nc0) {
  PilotPattern p;
  p.num_antennas = nt;
  p.num_subcarriers = nc;
  p.antennas = strided(nt, nt0, "antenna");
  p.subcarriers = strided(nc, nc0, "subcarrier");
  return p;
}

void PilotPattern::validate() const {
  if (antennas.empty() || subcarriers.empty()) throw ContractError("pilot pattern: empty index set");
  check_increasing(antennas, num_antennas, "antenna");
  check_increasing(subcarriers, num_subcarriers, "subcarrier");
}

CMatrix extract_pilot(const CMatrix& H, const PilotPattern& omega) {
  omega.validate();
  if (H.rows() != omega.num_antennas || H.cols() != omega.num_subcarriers) {
    throw ContractError("extract_pilot: channel is " + std::to_string(H.rows()) + "x" + std::to_string(H.cols()) +
                        ", pattern expects " + std::to_string(omega.num_antennas) + "x" +
                        std::to_string(omega.num_subcarriers));
  }
  CMatrix out(omega.rows(), omega.cols());
  for (std::size_t a = 0; a < omega.rows(); ++a) {
    for (std::size_t b = 0; b < omega.cols(); ++b) out(a, b) = H(omega.antennas[a], omega.subcarriers[b]);
  }
  return out;
}

CMatrix scatter_pilot(const CMatrix& pilot, const PilotPattern& omega) {
  omega.validate();
  if (pilot.rows() != omega.rows() || pilot.cols() != omega.cols()) throw ContractError("scatter_pilot: shape mismatch");
  CMatrix out(omega.num_antennas, omega.num_subcarriers);
  for (std::size_t a = 0; a < omega.rows(); ++a) {
    for (std::size_t b = 0; b < omega.cols(); ++b) out(omega.antennas[a], omega.subcarriers[b]) = pilot(a, b);
  }
  return out;
}

CMatrix apply_disturbance(const CMatrix& H, const DisturbanceSpec& spec, std::uint64_t seed) {
  if (!(spec.sigma >= 0.0)) throw ContractError("apply_disturbance: sigma must be nonnegative");
  if (spec.sigma == 0.0) return H;
  Rng rng(seed);
  std::normal_distribution<double> d(1.0, spec.sigma);
  CMatrix out = H;
  for (auto& v : out.data()) v *= d(rng);
  return out;
}

}  // namespace cdlab::sim
