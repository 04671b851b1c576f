// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdlab/checkpoint.hpp"
#include "cdlab/nets/model.hpp"
#include "cdlab/sim/dataset.hpp"
#include "cdlab/sim/pilot.hpp"

namespace cdlab::train {

/// Raised when a loss or gradient stops being finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean over the batch of the squared Frobenius norm of (target - pred).
Var mse_loss(const CVar& pred, const CVar& target);

/// S^-0.5 * min(step^-0.5, step * warmup^-1.5); step >= 1.
double lr_at(std::uint64_t step, double width, std::uint64_t warmup);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  static AdamState for_params(const ParameterSet& params);
  void validate(const ParameterSet& params) const;
};

/// One bias-corrected Adam update from the gradients held in `params`.
/// Throws TrainingError before touching anything if a gradient is non-finite.
void adam_step(ParameterSet& params, AdamState& state, double lr);

struct TrainConfig {
  std::size_t batch = 32;
  std::size_t steps = 2000;
  std::size_t warmup = 4000;
  std::size_t schedule_width = 0;  // 0 means the model width
  std::uint64_t seed = 1;
  double augment_ratio = 0.5;
  std::size_t augment_span = 0;  // 0 means 2 * (n + 1)
  std::size_t checkpoint_interval = 0;

  template <class V>
  void visit(V& v) {
    v("batch", batch);
    v("steps", steps);
    v("warmup", warmup);
    v("schedule_width", schedule_width);
    v("seed", seed);
    v("augment_ratio", augment_ratio);
    v("augment_span", augment_span);
    v("checkpoint_interval", checkpoint_interval);
  }

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct Batch {
  ComplexTensor past;    // [B, n, nt, nc]
  ComplexTensor pilot;   // [B, nt0, nc0]
  ComplexTensor target;  // [B, nt, nc]
};

/// Each window holds n past slots followed by the present slot.
Batch assemble_batch(const nets::ModelSpec& spec, std::span<const sim::ChannelSequence> windows);

/// Windows for training step `step` (1-based). Augmented windows come first;
/// their count is round(batch * augment_ratio).
std::vector<sim::ChannelSequence> sample_windows(const sim::Dataset& data, const nets::ModelSpec& spec,
                                                 const TrainConfig& cfg, std::uint64_t step);

/// Forward pass on a fresh tape; returns the prediction.
ComplexTensor predict(const nets::ModelSpec& spec, const ParameterSet& params, const Batch& batch);

struct LossRow {
  std::uint64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;

  friend bool operator==(const LossRow&, const LossRow&) = default;
};

std::string loss_csv(std::span<const LossRow> rows);

struct TrainState {
  nets::ModelSpec spec;
  TrainConfig config;
  ParameterSet params;
  AdamState adam;
  std::uint64_t step = 0;  // completed steps
  std::vector<LossRow> trace;

  static TrainState fresh(const nets::ModelSpec& spec, const TrainConfig& cfg);
};

/// Loss and gradients for one batch; gradients are left in state.params.
double loss_and_grad(TrainState& state, const Batch& batch);

/// Samples, differentiates and updates once. Returns the pre-update loss.
double train_step(TrainState& state, const sim::Dataset& data);

using CheckpointHook = std::function<void(const TrainState&)>;

/// Runs until state.step == config.steps, calling `on_checkpoint` every
/// checkpoint_interval steps.
void train(TrainState& state, const sim::Dataset& data, const CheckpointHook& on_checkpoint = {});

/// Parameters, Adam moments, step counter, loss trace and both configs.
Checkpoint to_checkpoint(const TrainState& state);
TrainState from_checkpoint(const Checkpoint& ckpt);

/// Model spec and parameters only; works for any training checkpoint.
struct LoadedModel {
  nets::ModelSpec spec;
  ParameterSet params;
};
LoadedModel load_model(const Checkpoint& ckpt);

}  // namespace cdlab::train
