// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstddef>
#include <functional>

namespace cdlab {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 means hardware
/// concurrency). Results must not depend on scheduling; the first exception
/// thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

std::size_t resolve_jobs(std::size_t jobs);

}  // namespace cdlab
