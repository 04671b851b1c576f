// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cdlab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Hierarchical seed splitting: every component derives its stream from its
// parent's seed and a stable label, so one root seed reproduces a whole run.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace cdlab
