// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/parameters.hpp"

namespace cdlab {

struct NamedArray {
  std::string name;
  Tensor value;

  friend bool operator==(const NamedArray&, const NamedArray&) = default;
};

/// Flat container of named arrays plus a free-text manifest.
///
/// Layout (all integers little-endian):
///   "CDCK" | u32 version | u64 manifest_len | manifest bytes | u32 count |
///   count x { u32 name_len | name | u32 rank | u64 dims[rank] | f64 data[] }
struct Checkpoint {
  std::string manifest;
  std::vector<NamedArray> arrays;

  const Tensor* find(std::string_view name) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Appends every parameter value, prefixed by `prefix`.
void append_parameters(Checkpoint& ckpt, const ParameterSet& params, std::string_view prefix = "");
/// Restores values into an already-shaped set; names and shapes must match.
void restore_parameters(const Checkpoint& ckpt, ParameterSet& params, std::string_view prefix = "");

}  // namespace cdlab
