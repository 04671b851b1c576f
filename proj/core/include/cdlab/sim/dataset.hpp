// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cdlab/cmatrix.hpp"
#include "cdlab/sim/scene.hpp"

namespace cdlab::sim {

struct ChannelMatrix {
  CMatrix H;
  std::int64_t slot = 0;

  friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;
};

struct ChannelSequence {
  std::vector<ChannelMatrix> slots;
  std::vector<Vec3> positions;  // one per slot, or empty
  Mobility mobility = Mobility::mobile;
  std::uint64_t seed = 0;

  std::size_t size() const { return slots.size(); }
  const CMatrix& operator[](std::size_t i) const { return slots[i].H; }

  /// Consecutive slot indices, equal shapes, finite entries, positions aligned.
  void validate() const;

  friend bool operator==(const ChannelSequence&, const ChannelSequence&) = default;
};

struct Dataset {
  std::size_t num_antennas = 0;
  std::size_t num_subcarriers = 0;
  std::vector<ChannelSequence> sequences;
  std::vector<std::string> notes;  // free-form key=value lines

  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// "CDS1" container. Header and payload are little-endian; the trailing
// metadata block is text with positions printed at 17 significant digits.
std::string encode_dataset(const Dataset& ds);
Dataset decode_dataset(std::string_view bytes);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

/// Channel sequence along a fresh trajectory in `region`.
ChannelSequence generate_sequence(const Scene& scene, const ScenarioConfig& cfg, Mobility kind, std::size_t length,
                                  const Region& region, std::uint64_t seed);

/// Output element k is seq[indices[k]]; slot indices restart at seq's first slot.
ChannelSequence augment_with_indices(const ChannelSequence& seq, std::span<const std::size_t> indices);
/// Draws out_len elements uniformly with replacement; order is free.
ChannelSequence augment_sequence(const ChannelSequence& seq, std::size_t out_len, std::uint64_t seed);

struct DatasetPlan {
  std::size_t train_count = 3000;
  std::size_t train_length = 32;
  double train_static_fraction = 0.5;
  std::size_t test_mobile_count = 20000;
  std::size_t test_static_count = 20000;
  std::size_t test_length = 17;

  template <class V>
  void visit(V& v) {
    v("train_count", train_count);
    v("train_length", train_length);
    v("train_static_fraction", train_static_fraction);
    v("test_mobile_count", test_mobile_count);
    v("test_static_count", test_static_count);
    v("test_length", test_length);
  }

  void validate() const;
};

struct DatasetFiles {
  std::filesystem::path train;
  std::filesystem::path test_mobile;
  std::filesystem::path test_static;
  std::filesystem::path manifest;

  static DatasetFiles in(const std::filesystem::path& dir);
};

struct GeneratedData {
  Dataset train;
  Dataset test_mobile;
  Dataset test_static;
  std::string manifest;
};

/// Pure generation; sequences are independent and built on up to `jobs` threads.
GeneratedData generate_datasets(const ScenarioConfig& cfg, const DatasetPlan& plan, std::uint64_t seed,
                                std::size_t jobs = 1);

/// Validates everything (including region overlap) before writing any file.
DatasetFiles build_dataset(const ScenarioConfig& cfg, const DatasetPlan& plan, std::uint64_t seed,
                           const std::filesystem::path& out_dir, std::size_t jobs = 1);

}  // namespace cdlab::sim
