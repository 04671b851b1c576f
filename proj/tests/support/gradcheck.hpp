// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdlab/parameters.hpp"
#include "cdlab/rng.hpp"
#include "cdlab/tape.hpp"

namespace cdlab::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst;  // "input[k]" or parameter name, plus flat index
  std::size_t checked = 0;
};

// Builds a scalar loss from leaf vars bound to `inputs`.
using LossFn = std::function<Var(Tape&, const std::vector<Var>&)>;
// Builds a scalar loss from a ParameterSet bound on the tape.
using ParamLossFn = std::function<Var(Tape&, ParameterSet&)>;

// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps entries
// whose true gradient is near zero from dominating through cancellation
// noise of the central difference.
inline constexpr double kGradFloor = 1e-3;

GradCheckResult check_gradients(const LossFn& fn, std::vector<Tensor> inputs, double h = 1e-6,
                                double floor = kGradFloor);

// Checks every parameter entry, or a random subset of at most
// `max_per_param` entries per tensor when nonzero.
GradCheckResult check_param_gradients(const ParamLossFn& fn, ParameterSet& params, double h = 1e-6,
                                      double floor = kGradFloor, std::size_t max_per_param = 0,
                                      std::uint64_t seed = 7);

Tensor random_tensor(const Shape& shape, Rng& rng, double scale = 1.0);

}  // namespace cdlab::testing
