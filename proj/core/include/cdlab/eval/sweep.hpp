// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cdlab/eval/evaluate.hpp"

namespace cdlab::eval {

/// Trains a model or loads it from `<dir>/<name>.ckpt`. A stored checkpoint
/// must match the requested spec and training config; one that stopped
/// early is resumed unless the store is load-only.
class ModelStore {
 public:
  ModelStore(std::filesystem::path dir, const sim::Dataset* train_data, bool load_only = false);

  static std::string checkpoint_name(const nets::ModelSpec& spec, const train::TrainConfig& cfg);
  std::filesystem::path path_for(const nets::ModelSpec& spec, const train::TrainConfig& cfg) const;

  train::LoadedModel obtain(const nets::ModelSpec& spec, const train::TrainConfig& cfg) const;

  /// Runs up to `jobs` trainings at once; results keep request order.
  std::vector<train::LoadedModel> obtain_all(std::span<const nets::ModelSpec> specs, const train::TrainConfig& cfg,
                                             std::size_t jobs) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  const sim::Dataset* train_;
  bool load_only_;
};

struct NamedTest {
  std::string name;
  const sim::Dataset* data = nullptr;
};

struct SweepRow {
  std::string experiment;
  std::string cell;
  double x = 0.0;
  std::uint64_t seed = 0;
  EvalReport report;
};

struct SweepContext {
  nets::ModelSpec base;
  train::TrainConfig train;
  const ModelStore* store = nullptr;
  std::vector<NamedTest> tests;
  EvalOptions eval;
  std::size_t jobs = 1;
};

struct PilotSize {
  std::size_t nt0 = 0;
  std::size_t nc0 = 0;
};

/// Rows are ordered size, model, test set.
std::vector<SweepRow> sweep_pilot_size(const SweepContext& ctx, std::span<const nets::Variant> models,
                                       std::span<const PilotSize> sizes);

/// Rows are ordered n, model, test set.
std::vector<SweepRow> sweep_past_length(const SweepContext& ctx, std::span<const nets::Variant> models,
                                        std::span<const std::size_t> n_values);

/// {0, 0.02, 0.04, ..., 1.28}
std::vector<double> default_sigma_grid();

/// Evaluates fixed models under each sigma. Disturbance draws depend only on
/// (eval seed, sequence, slot), so cells differ in intensity alone.
/// Rows are ordered sigma, model, test set.
std::vector<SweepRow> sweep_disturbance(std::span<const Acquirer* const> models, std::span<const NamedTest> tests,
                                        std::span<const double> sigmas, const EvalOptions& base);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace cdlab::eval
